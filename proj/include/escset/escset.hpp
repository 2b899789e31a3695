#pragma once

#include "escset/eval.hpp"
#include "escset/extended_point.hpp"
#include "escset/field.hpp"
#include "escset/iteration_config.hpp"
#include "escset/map_expr.hpp"
#include "escset/map_parser.hpp"
#include "escset/orbit.hpp"
#include "escset/parallel.hpp"
#include "escset/report.hpp"
#include "escset/sampling.hpp"
#include "escset/strips.hpp"
#include "escset/verify.hpp"
#include "escset/window.hpp"
