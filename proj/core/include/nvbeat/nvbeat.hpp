#pragma once

#include "nvbeat/analytic_models.hpp"
#include "nvbeat/dynamics.hpp"
#include "nvbeat/errors.hpp"
#include "nvbeat/estimation/axis_search.hpp"
#include "nvbeat/estimation/fitting.hpp"
#include "nvbeat/estimation/forward_model.hpp"
#include "nvbeat/estimation/scan_dataset.hpp"
#include "nvbeat/estimation/sensitivity.hpp"
#include "nvbeat/estimation/synthesis.hpp"
#include "nvbeat/parallel.hpp"
#include "nvbeat/spectrum.hpp"
#include "nvbeat/spin_core.hpp"
#include "nvbeat/tensor_geometry.hpp"
#include "nvbeat/types.hpp"
