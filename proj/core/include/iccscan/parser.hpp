#pragma once

#include "iccscan/ast.hpp"
#include "iccscan/source.hpp"

namespace iccscan {

/// Parses decompiled Java source into a statement-level AST.
///
/// The grammar covers what decompilers emit for ordinary method bodies:
/// local declarations with initializers, chained calls, casts, object
/// creation, assignments, returns and string literals. Compound statements
/// (if/for/while/do/try/switch/synchronized) become Other headers that own
/// their nested statements. Anonymous class bodies and block lambdas are
/// parsed as separate synthetic classes so that calls inside them remain
/// visible; the statement that contained them is kept as Other with a
/// diagnostic.
///
/// Never throws on malformed input: unparseable statements and members
/// degrade to Other statements (or are skipped) with a diagnostic. A file
/// without any class declaration yields no classes and exactly one
/// diagnostic.
ParsedFile parse_file(const SourceFile& source);

} // namespace iccscan
