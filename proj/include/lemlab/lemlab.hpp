#pragma once

#include "lemlab/error.hpp"
#include "lemlab/poly_core.hpp"
#include "lemlab/quadrature.hpp"
#include "lemlab/root_solver.hpp"
#include "lemlab/region.hpp"
#include "lemlab/region_measure.hpp"
#include "lemlab/arclength.hpp"
#include "lemlab/conformal_area.hpp"
#include "lemlab/parallel.hpp"
#include "lemlab/inequality_suite.hpp"
#include "lemlab/maximizer_search.hpp"
#include "lemlab/json_io.hpp"
#include "lemlab/export.hpp"
