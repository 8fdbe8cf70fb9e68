#pragma once

// Umbrella header for the beta-normal library.
#include "betanorm/errors.hpp"
#include "betanorm/quadrature.hpp"
#include "betanorm/specfun.hpp"
#include "betanorm/series.hpp"
#include "betanorm/distribution.hpp"
#include "betanorm/modality.hpp"
#include "betanorm/io.hpp"
