#pragma once

#include "voxfact/scalar.hpp"
#include "voxfact/graded.hpp"
#include "voxfact/preset.hpp"
#include "voxfact/vertex_engine.hpp"
#include "voxfact/geometry.hpp"
#include "voxfact/geometric_mu.hpp"
#include "voxfact/functional.hpp"
#include "voxfact/open_set.hpp"
#include "voxfact/expression.hpp"
#include "voxfact/relations.hpp"
#include "voxfact/check_report.hpp"
#include "voxfact/mu_checks.hpp"
#include "voxfact/factorization_checks.hpp"
#include "voxfact/json_io.hpp"
#include "voxfact/suite.hpp"
