#pragma once

#include "rns/numerics/constants.hpp"
#include "rns/numerics/distributions.hpp"
#include "rns/numerics/error.hpp"
#include "rns/numerics/quadrature.hpp"
#include "rns/numerics/roots.hpp"

#include "rns/core/oracle.hpp"
#include "rns/core/problem.hpp"
#include "rns/core/random.hpp"
#include "rns/core/result.hpp"
#include "rns/core/running_stat.hpp"

#include "rns/fixed_precision/config.hpp"
#include "rns/fixed_precision/sequential.hpp"
#include "rns/fixed_precision/stagewise.hpp"

#include "rns/fixed_budget/allocation.hpp"
#include "rns/fixed_budget/evi.hpp"
#include "rns/fixed_budget/kg.hpp"
#include "rns/fixed_budget/ocba.hpp"

#include "rns/parallel/aps.hpp"
#include "rns/parallel/kt_plus.hpp"
#include "rns/parallel/pool.hpp"

#include "rns/harness/evaluate.hpp"
#include "rns/harness/instances.hpp"
#include "rns/harness/procedure.hpp"
#include "rns/harness/report.hpp"

#include "rns/cli/config_file.hpp"
