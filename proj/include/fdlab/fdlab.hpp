#pragma once

#include "fdlab/basics.hpp"
#include "fdlab/builtins.hpp"
#include "fdlab/enumerate.hpp"
#include "fdlab/failure_detectors.hpp"
#include "fdlab/json_io.hpp"
#include "fdlab/model.hpp"
#include "fdlab/pattern.hpp"
#include "fdlab/problems.hpp"
#include "fdlab/stutter.hpp"
#include "fdlab/transformations.hpp"
#include "fdlab/validate.hpp"
#include "fdlab/verify.hpp"
