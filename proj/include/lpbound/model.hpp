#pragma once

#include "lpbound/catalog.hpp"
#include "lpbound/norms.hpp"
#include "lpbound/query.hpp"
#include "lpbound/relation.hpp"
#include "lpbound/result.hpp"
#include "lpbound/value.hpp"
#include "lpbound/varset.hpp"
