#pragma once

#include "netident/basis.hpp"
#include "netident/derivatives.hpp"
#include "netident/errors.hpp"
#include "netident/graph.hpp"
#include "netident/identify.hpp"
#include "netident/model.hpp"
#include "netident/network.hpp"
#include "netident/parallel.hpp"
#include "netident/report.hpp"
#include "netident/simulate.hpp"
