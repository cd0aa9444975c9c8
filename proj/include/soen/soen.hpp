#pragma once

#include "soen/cli.hpp"
#include "soen/config.hpp"
#include "soen/detector.hpp"
#include "soen/emitter.hpp"
#include "soen/energy.hpp"
#include "soen/errors.hpp"
#include "soen/floorplan.hpp"
#include "soen/metrics.hpp"
#include "soen/network.hpp"
#include "soen/neuron.hpp"
#include "soen/random.hpp"
#include "soen/trace_io.hpp"
#include "soen/units.hpp"
