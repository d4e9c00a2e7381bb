#pragma once

#include "arveson/linalg.hpp"
#include "arveson/mindex.hpp"
#include "arveson/colligation.hpp"
#include "arveson/observability.hpp"
#include "arveson/sampling.hpp"
#include "arveson/kernels.hpp"
#include "arveson/model.hpp"
#include "arveson/beurling.hpp"
#include "arveson/charfun.hpp"
