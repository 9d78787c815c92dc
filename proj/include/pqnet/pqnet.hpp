#ifndef PQNET_PQNET_HPP
#define PQNET_PQNET_HPP

#include "pqnet/analysis.hpp"
#include "pqnet/core_model.hpp"
#include "pqnet/errors.hpp"
#include "pqnet/experiment.hpp"
#include "pqnet/linprog.hpp"
#include "pqnet/matrix.hpp"
#include "pqnet/model_io.hpp"
#include "pqnet/optimality.hpp"
#include "pqnet/path_analysis.hpp"
#include "pqnet/policies.hpp"
#include "pqnet/report.hpp"
#include "pqnet/simulator.hpp"
#include "pqnet/static_fluid.hpp"

#endif  // PQNET_PQNET_HPP
