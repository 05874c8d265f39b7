#pragma once

#include "ipe/bounds.hpp"
#include "ipe/encoders.hpp"
#include "ipe/encoding.hpp"
#include "ipe/error.hpp"
#include "ipe/json_io.hpp"
#include "ipe/modmath.hpp"
#include "ipe/predicates.hpp"
#include "ipe/randomized.hpp"
#include "ipe/reductions.hpp"
#include "ipe/table.hpp"
#include "ipe/zqlinalg.hpp"
