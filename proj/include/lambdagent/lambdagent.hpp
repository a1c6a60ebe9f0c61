#pragma once

#include "lambdagent/compile.hpp"
#include "lambdagent/config.hpp"
#include "lambdagent/cost.hpp"
#include "lambdagent/eval.hpp"
#include "lambdagent/fault.hpp"
#include "lambdagent/lint.hpp"
#include "lambdagent/oracle.hpp"
#include "lambdagent/predicate.hpp"
#include "lambdagent/pretty.hpp"
#include "lambdagent/store.hpp"
#include "lambdagent/subst.hpp"
#include "lambdagent/supplement.hpp"
#include "lambdagent/term.hpp"
#include "lambdagent/toolreg.hpp"
#include "lambdagent/trace.hpp"
#include "lambdagent/typecheck.hpp"
#include "lambdagent/value.hpp"
#include "lambdagent/version.hpp"
