#pragma once

#include "pardg/baselines.hpp"
#include "pardg/batch.hpp"
#include "pardg/dynamics.hpp"
#include "pardg/generator.hpp"
#include "pardg/graph.hpp"
#include "pardg/harness.hpp"
#include "pardg/io.hpp"
#include "pardg/prng.hpp"
#include "pardg/quadratic.hpp"
#include "pardg/sampling.hpp"
#include "pardg/solver.hpp"
#include "pardg/types.hpp"
#include "pardg/verify.hpp"
