#pragma once

#include "wzone/analytic.hpp"
#include "wzone/channel.hpp"
#include "wzone/claim.hpp"
#include "wzone/crypto.hpp"
#include "wzone/encoding.hpp"
#include "wzone/event_queue.hpp"
#include "wzone/evidence.hpp"
#include "wzone/geometry.hpp"
#include "wzone/heatmap.hpp"
#include "wzone/merkle.hpp"
#include "wzone/policy.hpp"
#include "wzone/random.hpp"
#include "wzone/report.hpp"
#include "wzone/scenario.hpp"
#include "wzone/sensing.hpp"
#include "wzone/simulation.hpp"
#include "wzone/witness.hpp"
#include "wzone/zone.hpp"
