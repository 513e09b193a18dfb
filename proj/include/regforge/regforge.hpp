#pragma once

// Umbrella header for the toolkit.

#include "regforge/closedloop.hpp"
#include "regforge/controller.hpp"
#include "regforge/errors.hpp"
#include "regforge/freqdata.hpp"
#include "regforge/internal_model.hpp"
#include "regforge/io.hpp"
#include "regforge/model.hpp"
#include "regforge/numerics.hpp"
#include "regforge/pipeline.hpp"
#include "regforge/signals.hpp"
#include "regforge/stabilization.hpp"
