#pragma once

#include "saddle/builtin.hpp"
#include "saddle/enumerator.hpp"
#include "saddle/equidistribution.hpp"
#include "saddle/error.hpp"
#include "saddle/length_calculus.hpp"
#include "saddle/parallel.hpp"
#include "saddle/params.hpp"
#include "saddle/quadrature.hpp"
#include "saddle/report_json.hpp"
#include "saddle/rng.hpp"
#include "saddle/sl2.hpp"
#include "saddle/surface.hpp"
#include "saddle/surface_io.hpp"
#include "saddle/vector.hpp"
