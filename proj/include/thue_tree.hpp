#pragma once

#include "thue_tree/errors.hpp"
#include "thue_tree/rational.hpp"
#include "thue_tree/rng.hpp"
#include "thue_tree/tree.hpp"
#include "thue_tree/coloring.hpp"
#include "thue_tree/power.hpp"
#include "thue_tree/tree_io.hpp"
#include "thue_tree/oracle.hpp"
#include "thue_tree/solver.hpp"
#include "thue_tree/entropy_log.hpp"
#include "thue_tree/experiment.hpp"
