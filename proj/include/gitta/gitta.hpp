#pragma once

#include "gitta/error.hpp"
#include "gitta/template.hpp"
#include "gitta/merge.hpp"
#include "gitta/tree.hpp"
#include "gitta/grammar.hpp"
#include "gitta/induction.hpp"
#include "gitta/eval.hpp"
