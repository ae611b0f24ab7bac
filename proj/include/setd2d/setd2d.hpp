#pragma once

#include "attack.hpp"
#include "core.hpp"
#include "crypto.hpp"
#include "experiments.hpp"
#include "outputs.hpp"
#include "protocol.hpp"
#include "radio.hpp"
#include "scenario.hpp"
#include "selection.hpp"
#include "simulation.hpp"
#include "social.hpp"
#include "trust.hpp"
