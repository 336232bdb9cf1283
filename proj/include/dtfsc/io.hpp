#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dtfsc/dt.hpp"
#include "dtfsc/dtfsc.hpp"
#include "dtfsc/fsc.hpp"
#include "dtfsc/pomdp.hpp"
#include "dtfsc/skip.hpp"

namespace dtfsc {

/// JSON documents written and read by the toolkit. Every document carries a
/// "kind" field. Output is canonical: keys sorted, two-space indentation,
/// shortest round-trip doubles, trailing newline. Parsing reports schema
/// violations as SchemaError with a JSON pointer to the offending value.
enum class DocumentKind { pomdp, fsc, skip_fsc, dtfsc, iteration_index };

const char* to_string(DocumentKind k);
/// Reads the "kind" field only.
DocumentKind document_kind(std::string_view text);

std::string dump_pomdp(const Pomdp& model);
/// Probabilities may be numbers or "p/q" strings. A "rewards" field is
/// accepted and ignored; a note is appended to `warnings` if given.
Pomdp parse_pomdp(std::string_view text, std::vector<std::string>* warnings = nullptr);

std::string dump_fsc(const Fsc& fsc);
Fsc parse_fsc(std::string_view text);

std::string dump_skip_fsc(const SkipFsc& sf);
SkipFsc parse_skip_fsc(std::string_view text);

std::string dump_index(const IterationIndex& idx);
IterationIndex parse_index(std::string_view text);

std::string dump_dtfsc(const DtFsc& dt);
DtFsc parse_dtfsc(std::string_view text);

/// Throws Error when the file cannot be read or written.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace dtfsc
