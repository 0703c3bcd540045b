#pragma once

#include "lagl/affine.hpp"
#include "lagl/curves.hpp"
#include "lagl/error.hpp"
#include "lagl/experiment.hpp"
#include "lagl/field.hpp"
#include "lagl/geodesy.hpp"
#include "lagl/io.hpp"
#include "lagl/report.hpp"
