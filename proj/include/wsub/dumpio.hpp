#pragma once

// Line-delimited JSON dumps: one entity per line with its full outgoing
// neighbourhood. Gzip input is detected by its magic bytes.

#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsub/wgraph.hpp"

namespace wsub {

struct EntityDocument {
  EntityId id;
  std::vector<Statement> statements;  // all with subject == id

  std::string_view entityType() const { return id.isItem() ? "item" : "property"; }
  bool operator==(const EntityDocument&) const = default;
};

enum class DumpFormat { Wbjl, WikidataJson };
enum class ErrorPolicy { Skip, FailFast };

/// "wbjl" or "wikidata-json"; throws std::invalid_argument otherwise.
DumpFormat dumpFormatFromName(std::string_view name);

struct ReadOptions {
  DumpFormat format = DumpFormat::Wbjl;
  ErrorPolicy policy = ErrorPolicy::Skip;
};

class DumpError : public std::runtime_error {
public:
  DumpError(const std::string& msg, std::size_t line);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Parses one line. Returns false for lines carrying no document (blank,
/// array brackets, entity types outside the model); throws DumpError on
/// malformed input.
bool parseDocumentLine(std::string_view line, DumpFormat format, EntityDocument& out, std::size_t lineNo = 0);

/// Sequential reader. Bad lines are counted and skipped, or rethrown under
/// ErrorPolicy::FailFast.
class DumpReader {
public:
  DumpReader(std::istream& in, ReadOptions opts = {});
  ~DumpReader();
  DumpReader(const DumpReader&) = delete;
  DumpReader& operator=(const DumpReader&) = delete;

  bool next(EntityDocument& doc);

  std::size_t line() const { return line_; }
  std::size_t documents() const { return documents_; }
  std::size_t errors() const { return errors_; }
  /// First few skipped-line messages, for reporting.
  const std::vector<std::string>& errorSamples() const { return samples_; }

private:
  class Inflater;
  std::unique_ptr<Inflater> inflater_;
  std::istream* stream_;
  ReadOptions opts_;
  std::string buf_;
  std::size_t line_ = 0, documents_ = 0, errors_ = 0;
  std::vector<std::string> samples_;
};

std::vector<EntityDocument> readDump(std::istream& in, ReadOptions opts = {});
std::vector<EntityDocument> readDumpString(std::string_view text, ReadOptions opts = {});

/// Canonical line, without the trailing newline. Properties in numeric
/// order, statements sorted by value then qualifiers, fixed key order.
std::string documentLine(const EntityDocument& doc);
void writeDocument(std::ostream& out, const EntityDocument& doc);
void writeDump(std::ostream& out, const std::vector<EntityDocument>& docs);
std::string writeDumpString(const std::vector<EntityDocument>& docs);

struct StreamStats {
  std::size_t entitiesRead = 0;
  std::size_t entitiesMatched = 0;  // documents with at least one kept statement
  std::size_t statementsEmitted = 0;
};

/// Single pass: writes each document restricted to the statements keep
/// accepts, dropping documents left empty.
StreamStats filterDump(DumpReader& in, std::ostream& out, const std::function<bool(const Statement&)>& keep);

/// Statements of documents sharing an id are unioned; duplicates, when
/// non-null, receives how many repeated ids were seen.
WikibaseGraph graphFromDocs(const std::vector<EntityDocument>& docs, std::size_t* duplicates = nullptr);
/// One document per subject, in id order.
std::vector<EntityDocument> docsFromGraph(const WikibaseGraph& g);

}  // namespace wsub
