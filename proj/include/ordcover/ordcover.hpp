#pragma once

#include "ordcover/circle/circle_group.hpp"
#include "ordcover/circle/pl_lift.hpp"
#include "ordcover/enclosure.hpp"
#include "ordcover/errors.hpp"
#include "ordcover/qm_core.hpp"
#include "ordcover/rational.hpp"
#include "ordcover/sl2/cover_element.hpp"
#include "ordcover/sl2/matrix.hpp"
#include "ordcover/sl2/sl2_cover.hpp"
