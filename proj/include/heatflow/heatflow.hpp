#pragma once

#include "heatflow/diagnostics.hpp"
#include "heatflow/diffusion.hpp"
#include "heatflow/error.hpp"
#include "heatflow/field_io.hpp"
#include "heatflow/laplace_beltrami.hpp"
#include "heatflow/mesh.hpp"
#include "heatflow/polynomial.hpp"
#include "heatflow/special_functions.hpp"
#include "heatflow/sphere.hpp"
#include "heatflow/stats.hpp"
#include "heatflow/wavelet.hpp"
