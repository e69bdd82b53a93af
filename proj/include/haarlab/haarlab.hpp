#pragma once

#include "haarlab/config.hpp"
#include "haarlab/dyadic.hpp"
#include "haarlab/root_two.hpp"
#include "haarlab/combination.hpp"
#include "haarlab/normed_space.hpp"
#include "haarlab/combinatorics.hpp"
#include "haarlab/transforms.hpp"
#include "haarlab/quadrature.hpp"
#include "haarlab/estimate.hpp"
#include "haarlab/diagonal.hpp"
#include "haarlab/checks.hpp"
#include "haarlab/json_io.hpp"
#include "haarlab/experiments.hpp"
