#pragma once

#include "gcx/bigint.hpp"
#include "gcx/dag.hpp"
#include "gcx/dst.hpp"
#include "gcx/engine.hpp"
#include "gcx/error.hpp"
#include "gcx/expand.hpp"
#include "gcx/grammar.hpp"
#include "gcx/grammar_io.hpp"
#include "gcx/oracle.hpp"
#include "gcx/path_dfa.hpp"
#include "gcx/query_compiler.hpp"
#include "gcx/slp.hpp"
#include "gcx/slp_output.hpp"
#include "gcx/tree.hpp"
#include "gcx/xml.hpp"
#include "gcx/xpath.hpp"
