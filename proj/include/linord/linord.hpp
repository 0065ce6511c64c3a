#pragma once

#include "linord/classify.hpp"
#include "linord/cnf.hpp"
#include "linord/coded_order.hpp"
#include "linord/codes.hpp"
#include "linord/epi.hpp"
#include "linord/epi_search.hpp"
#include "linord/epi_zeta.hpp"
#include "linord/fin_order.hpp"
#include "linord/finite_oracle.hpp"
#include "linord/parse.hpp"
#include "linord/realize.hpp"
#include "linord/term.hpp"
#include "linord/verdict.hpp"
