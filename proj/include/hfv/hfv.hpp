#pragma once

#include "hfv/array2d.hpp"
#include "hfv/block.hpp"
#include "hfv/boundary.hpp"
#include "hfv/emulation.hpp"
#include "hfv/executor.hpp"
#include "hfv/flux.hpp"
#include "hfv/mesh.hpp"
#include "hfv/metrics.hpp"
#include "hfv/mms.hpp"
#include "hfv/muscl.hpp"
#include "hfv/partition.hpp"
#include "hfv/perf_model.hpp"
#include "hfv/residual.hpp"
#include "hfv/state.hpp"
#include "hfv/time_integration.hpp"
