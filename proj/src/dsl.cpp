// Reader and writer for the `.msa` system-description language.
//
//   service <name> { endpoint <METHOD> <path> [roles: r1,r2] ... }
//   call <METHOD> <path> -> <METHOD> <path>
//   entity <name>
//   role <name>
//   access <METHOD> <path> <ops> <entity>     ops: creates,reads,updates,deletes
//
// `#` starts a comment running to end of line. Paths start with '/' and run
// to the next whitespace, '[' or '#', so route templates may contain braces.

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "msaverify/error.hpp"
#include "msaverify/ingest.hpp"

namespace msaverify {

namespace {

enum class Tok { Word, Path, LBrace, RBrace, LBracket, RBracket, Comma, Colon, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

const char* describe(Tok kind) {
  switch (kind) {
    case Tok::Word: return "identifier";
    case Tok::Path: return "path";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
  }
  return "token";
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_blank();
    Token token;
    token.line = line_;
    token.column = column_;
    if (pos_ >= text_.size()) return token;

    const char c = text_[pos_];
    auto single = [&](Tok kind) {
      token.kind = kind;
      token.text = std::string(1, c);
      advance();
      return token;
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case ',': return single(Tok::Comma);
      case ':': return single(Tok::Colon);
      default: break;
    }
    if (c == '-' && peek(1) == '>') {
      advance();
      advance();
      token.kind = Tok::Arrow;
      token.text = "->";
      return token;
    }
    if (c == '/') {
      token.kind = Tok::Path;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
             text_[pos_] != '[' && text_[pos_] != '#') {
        token.text.push_back(text_[pos_]);
        advance();
      }
      return token;
    }
    if (is_word_char(c)) {
      token.kind = Tok::Word;
      while (pos_ < text_.size() && is_word_char(text_[pos_]) &&
             !(text_[pos_] == '-' && peek(1) == '>')) {
        token.text.push_back(text_[pos_]);
        advance();
      }
      return token;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

struct RouteRef {
  std::string method;
  std::string path;
  std::size_t line;
  std::size_t column;
};

struct PendingCall {
  RouteRef from;
  RouteRef to;
};

struct PendingAccess {
  RouteRef route;
  std::set<Operation> operations;
  std::string entity;
  std::size_t entity_line;
  std::size_t entity_column;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { current_ = lexer_.next(); }

  SystemModel parse() {
    while (current_.kind != Tok::End) statement();
    return build();
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, current_.line, current_.column);
  }

  Token take(Tok kind, const char* context) {
    if (current_.kind != kind) {
      fail(std::string("expected ") + describe(kind) + " " + context + ", found " +
           (current_.kind == Tok::End ? std::string(describe(Tok::End)) : "'" + current_.text + "'"));
    }
    Token token = std::move(current_);
    current_ = lexer_.next();
    return token;
  }

  bool at_keyword(std::string_view keyword) const {
    return current_.kind == Tok::Word && current_.text == keyword;
  }

  RouteRef route(const char* context) {
    const Token method = take(Tok::Word, context);
    if (!is_http_method(method.text)) {
      throw ParseError("unknown HTTP method '" + method.text + "'", method.line, method.column);
    }
    const Token path = take(Tok::Path, context);
    return {method.text, path.text, method.line, method.column};
  }

  void statement() {
    if (current_.kind != Tok::Word) fail("expected a statement, found '" + current_.text + "'");
    const Token keyword = take(Tok::Word, "");
    if (keyword.text == "service") {
      service();
    } else if (keyword.text == "call") {
      PendingCall call;
      call.from = route("after 'call'");
      take(Tok::Arrow, "between call endpoints");
      call.to = route("after '->'");
      calls_.push_back(std::move(call));
    } else if (keyword.text == "entity") {
      entities_.insert(take(Tok::Word, "after 'entity'").text);
      auth_used_ = true;
    } else if (keyword.text == "role") {
      roles_.insert(take(Tok::Word, "after 'role'").text);
      auth_used_ = true;
    } else if (keyword.text == "access") {
      access();
    } else {
      throw ParseError("unknown statement '" + keyword.text + "'", keyword.line, keyword.column);
    }
  }

  void service() {
    Microservice service;
    service.name = take(Tok::Word, "after 'service'").text;
    const ServiceId id = model_.microservices.size();
    take(Tok::LBrace, "to open the service body");
    while (current_.kind != Tok::RBrace) {
      if (!at_keyword("endpoint")) fail("expected 'endpoint' or '}' in service body");
      take(Tok::Word, "");
      RouteRef ref = route("after 'endpoint'");
      Endpoint endpoint;
      endpoint.index = model_.endpoints.size();
      endpoint.method = std::move(ref.method);
      endpoint.path = std::move(ref.path);
      endpoint.parent = id;
      if (current_.kind == Tok::LBracket) endpoint.permitted_roles = roles_clause();
      service.endpoint_indices.insert(endpoint.index);
      model_.endpoints.push_back(std::move(endpoint));
    }
    take(Tok::RBrace, "to close the service body");
    model_.microservices.push_back(std::move(service));
  }

  std::set<std::string> roles_clause() {
    take(Tok::LBracket, "");
    if (!at_keyword("roles")) fail("expected 'roles' in endpoint attribute list");
    take(Tok::Word, "");
    take(Tok::Colon, "after 'roles'");
    std::set<std::string> roles;
    if (current_.kind == Tok::Word) {
      roles.insert(take(Tok::Word, "").text);
      while (current_.kind == Tok::Comma) {
        take(Tok::Comma, "");
        roles.insert(take(Tok::Word, "after ','").text);
      }
    }
    take(Tok::RBracket, "to close the roles list");
    roles_.insert(roles.begin(), roles.end());
    auth_used_ = true;
    return roles;
  }

  void access() {
    PendingAccess access;
    access.route = route("after 'access'");
    do {
      if (!access.operations.empty()) take(Tok::Comma, "");
      const Token op = take(Tok::Word, "as access operation");
      static const std::map<std::string, Operation> kOps = {{"creates", Operation::Create},
                                                            {"reads", Operation::Read},
                                                            {"updates", Operation::Update},
                                                            {"deletes", Operation::Delete}};
      auto it = kOps.find(op.text);
      if (it == kOps.end()) {
        throw ParseError("unknown operation '" + op.text + "' (expected creates, reads, updates or deletes)",
                         op.line, op.column);
      }
      access.operations.insert(it->second);
    } while (current_.kind == Tok::Comma);
    const Token entity = take(Tok::Word, "naming the accessed entity");
    access.entity = entity.text;
    access.entity_line = entity.line;
    access.entity_column = entity.column;
    accesses_.push_back(std::move(access));
    auth_used_ = true;
  }

  EndpointId resolve(const RouteRef& ref) const {
    if (auto it = routes_.find({ref.method, ref.path}); it != routes_.end()) return it->second;
    throw ReferenceError("undeclared endpoint " + ref.method + " " + ref.path, ref.line, ref.column);
  }

  SystemModel build() {
    for (const auto& endpoint : model_.endpoints) routes_.try_emplace({endpoint.method, endpoint.path}, endpoint.index);
    for (const auto& call : calls_) {
      Edge edge{resolve(call.from), resolve(call.to)};
      if (!model_.edges.insert(edge).second) {
        throw ParseError("duplicate call " + call.from.method + " " + call.from.path + " -> " +
                             call.to.method + " " + call.to.path,
                         call.from.line, call.from.column);
      }
    }
    if (auth_used_) {
      AuthExtension auth;
      auth.roles = roles_;
      auth.entities = entities_;
      for (const auto& pending : accesses_) {
        if (!entities_.contains(pending.entity)) {
          throw ReferenceError("undeclared entity '" + pending.entity + "'", pending.entity_line,
                               pending.entity_column);
        }
        auth.accesses.push_back({resolve(pending.route), pending.entity, pending.operations});
      }
      std::sort(auth.accesses.begin(), auth.accesses.end());
      model_.auth = std::move(auth);
    }
    if (auto report = validate_model(model_); !report.ok()) {
      throw ModelError("invalid model: " + report.summary());
    }
    return std::move(model_);
  }

  Lexer lexer_;
  Token current_;
  SystemModel model_;
  std::vector<PendingCall> calls_;
  std::vector<PendingAccess> accesses_;
  std::set<std::string> roles_;
  std::set<std::string> entities_;
  bool auth_used_ = false;
  std::map<std::pair<std::string, std::string>, EndpointId> routes_;
};

std::string_view dsl_verb(Operation op) {
  switch (op) {
    case Operation::Create: return "creates";
    case Operation::Read: return "reads";
    case Operation::Update: return "updates";
    case Operation::Delete: return "deletes";
  }
  return "?";
}

}  // namespace

SystemModel parse_dsl(std::string_view text) { return Parser(text).parse(); }

std::string render_dsl(const SystemModel& model) {
  if (auto report = validate_model(model); !report.ok()) {
    throw ModelError("cannot render invalid model: " + report.summary());
  }
  // Declaration order assigns indices, so each service must own a
  // contiguous run of endpoints in service order.
  EndpointId expected = 0;
  for (const auto& service : model.microservices) {
    for (EndpointId e : service.endpoint_indices) {
      if (e != expected++) {
        throw ModelError("service '" + service.name + "' does not own a contiguous endpoint range");
      }
    }
  }

  std::ostringstream out;
  auto route = [&](EndpointId e) { return model.endpoints[e].method + " " + model.endpoints[e].path; };

  for (const auto& service : model.microservices) {
    out << "service " << service.name << " {\n";
    for (EndpointId e : service.endpoint_indices) {
      out << "  endpoint " << route(e);
      if (const auto& roles = model.endpoints[e].permitted_roles) {
        out << " [roles:";
        bool first = true;
        for (const auto& role : *roles) {
          out << (first ? " " : ",") << role;
          first = false;
        }
        out << "]";
      }
      out << "\n";
    }
    out << "}\n";
  }
  if (model.auth) {
    for (const auto& role : model.auth->roles) out << "role " << role << "\n";
    for (const auto& entity : model.auth->entities) out << "entity " << entity << "\n";
    auto accesses = model.auth->accesses;
    std::sort(accesses.begin(), accesses.end());
    for (const auto& access : accesses) {
      out << "access " << route(access.endpoint) << " ";
      bool first = true;
      for (Operation op : access.operations) {
        out << (first ? "" : ",") << dsl_verb(op);
        first = false;
      }
      out << " " << access.entity << "\n";
    }
  }
  for (const Edge& edge : model.edges) {
    out << "call " << route(edge.from) << " -> " << route(edge.to) << "\n";
  }
  return out.str();
}

}  // namespace msaverify
