// Umbrella header.

#pragma once

#include "qfuse/config.hpp"
#include "qfuse/fusion.hpp"
#include "qfuse/harness.hpp"
#include "qfuse/io.hpp"
#include "qfuse/navsim.hpp"
#include "qfuse/quadrature.hpp"
#include "qfuse/random.hpp"
#include "qfuse/sensor_models.hpp"
