#pragma once

#include "episim/config.hpp"
#include "episim/control.hpp"
#include "episim/epidemic.hpp"
#include "episim/error.hpp"
#include "episim/metrics.hpp"
#include "episim/mobility.hpp"
#include "episim/protocol.hpp"
#include "episim/rng.hpp"
#include "episim/scenario.hpp"
#include "episim/simulation.hpp"
#include "episim/switchboard.hpp"
#include "episim/types.hpp"
#include "episim/validation.hpp"
#include "episim/world.hpp"
