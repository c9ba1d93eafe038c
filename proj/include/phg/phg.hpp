#pragma once

#include "phg/affine.hpp"
#include "phg/catalog.hpp"
#include "phg/chart.hpp"
#include "phg/dual.hpp"
#include "phg/errors.hpp"
#include "phg/expr.hpp"
#include "phg/lie.hpp"
#include "phg/linalg.hpp"
#include "phg/parallelism.hpp"
#include "phg/report.hpp"
#include "phg/riemannian.hpp"
#include "phg/sampling.hpp"
#include "phg/tensor.hpp"
#include "phg/transport.hpp"
