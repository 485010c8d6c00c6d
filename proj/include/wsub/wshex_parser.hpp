#pragma once

#include <map>
#include <string>
#include <string_view>

#include "wsub/wshex.hpp"

namespace wsub {

struct ParseOptions {
  /// Extra names for entities, e.g. "birthPlace" -> P19. Looked up with the
  /// token as written, then its local name, then its expanded IRI.
  std::map<std::string, EntityId> aliases;
  /// Datatype given to bare numeric literals.
  Datatype literalDatatype = Datatype::Year;
};

/// Parses the compact schema syntax. Throws SchemaError (with line and
/// column when the error has a source position).
WShExSchema parseSchema(std::string_view text, const ParseOptions& options = {});

/// Maps an XML Schema local name ("date", "gYear", ...) to the datatypes it
/// accepts. Returns an empty vector for unsupported names.
std::vector<Datatype> xsdAccepted(std::string_view local);

}  // namespace wsub
