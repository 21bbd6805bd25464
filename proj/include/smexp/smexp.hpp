#pragma once

#include "smexp/rational.hpp"
#include "smexp/expansion.hpp"
#include "smexp/model.hpp"
#include "smexp/reduction.hpp"
#include "smexp/stationary.hpp"
#include "smexp/oracle.hpp"
#include "smexp/serialization.hpp"
