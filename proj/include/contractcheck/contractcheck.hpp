// contractcheck.hpp - umbrella include for the whole library.
//
// Pulls in the analysis stack from source text to rendered report. The CLI
// front end (cli.hpp) is left out on purpose: it drags in CLI11, which
// library consumers rarely want.

#pragma once

#include "contractcheck/blocks.hpp"
#include "contractcheck/model.hpp"
#include "contractcheck/logic.hpp"
#include "contractcheck/encode.hpp"
#include "contractcheck/solve.hpp"
#include "contractcheck/smtlib.hpp"
#include "contractcheck/analyze.hpp"
