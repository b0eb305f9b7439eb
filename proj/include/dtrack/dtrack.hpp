#pragma once

#include "dtrack/assignment.hpp"
#include "dtrack/config.hpp"
#include "dtrack/ddim.hpp"
#include "dtrack/denoiser.hpp"
#include "dtrack/experiments.hpp"
#include "dtrack/geometry.hpp"
#include "dtrack/kalman.hpp"
#include "dtrack/loss.hpp"
#include "dtrack/manifest.hpp"
#include "dtrack/metrics.hpp"
#include "dtrack/motchallenge.hpp"
#include "dtrack/oracle_denoiser.hpp"
#include "dtrack/pipeline.hpp"
#include "dtrack/proposals.hpp"
#include "dtrack/reference_tracker.hpp"
#include "dtrack/scene.hpp"
#include "dtrack/schedule.hpp"
#include "dtrack/signal_space.hpp"
#include "dtrack/simulator.hpp"
#include "dtrack/snap_denoiser.hpp"
#include "dtrack/stf.hpp"
#include "dtrack/tracker.hpp"
