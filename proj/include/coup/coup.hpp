#pragma once

#include "coup/types.hpp"
#include "coup/term.hpp"
#include "coup/fixbeta.hpp"
#include "coup/unify.hpp"
#include "coup/formula.hpp"
#include "coup/proof.hpp"
#include "coup/kernel.hpp"
#include "coup/search/trace.hpp"
#include "coup/search/candidates.hpp"
#include "coup/search/uniform.hpp"
#include "coup/search/prove.hpp"
#include "coup/oracle.hpp"
#include "coup/syntax/lexer.hpp"
#include "coup/syntax/parser.hpp"
#include "coup/syntax/printer.hpp"
#include "coup/syntax/theory.hpp"
#include "coup/syntax/certificate.hpp"
