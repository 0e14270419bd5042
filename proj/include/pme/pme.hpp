#pragma once

#include "pme/dataset.hpp"
#include "pme/embedding.hpp"
#include "pme/errors.hpp"
#include "pme/gpca.hpp"
#include "pme/io.hpp"
#include "pme/sobol.hpp"
#include "pme/stats.hpp"
#include "pme/surrogate.hpp"
#include "pme/types.hpp"
