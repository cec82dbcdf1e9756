#pragma once

#include "ablmc/config.hpp"
#include "ablmc/coupling.hpp"
#include "ablmc/estimators.hpp"
#include "ablmc/integrators.hpp"
#include "ablmc/model.hpp"
#include "ablmc/noise.hpp"
#include "ablmc/output.hpp"
#include "ablmc/particle.hpp"
#include "ablmc/qoi.hpp"
#include "ablmc/stats.hpp"
#include "ablmc/timeline.hpp"
