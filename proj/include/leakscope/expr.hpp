//
// Copyright 2026 The Leakscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "leakscope/error.hpp"

namespace leakscope {

// Arithmetic expressions in one variable t:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 't' | name '(' expr (',' expr)* ')' | '(' expr ')'
// with functions sin, log (one argument) and min, max (two arguments).
class Expression {
 public:
  static Expression parse(const std::string& text) {
    Parser parser{text, 0};
    auto root = parser.expr();
    parser.skip_space();
    if (parser.pos != text.size()) parser.fail("unexpected trailing input");
    return Expression(std::move(root), text);
  }

  double operator()(double t) const { return eval(*root_, t); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kLog, kMin, kMax };

  struct Node {
    Op op;
    double value = 0.0;
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw Error(ErrorKind::kParse,
                  "gain expression: " + what + " at offset " + std::to_string(pos));
    }
    void skip_space() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_space();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    void expect(char c) {
      if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    static NodePtr make(Op op, std::vector<NodePtr> args, double value = 0.0) {
      auto n = std::make_shared<Node>();
      n->op = op;
      n->value = value;
      n->args = std::move(args);
      return n;
    }

    NodePtr expr() {
      auto lhs = term();
      for (;;) {
        if (accept('+')) {
          lhs = make(Op::kAdd, {lhs, term()});
        } else if (accept('-')) {
          lhs = make(Op::kSub, {lhs, term()});
        } else {
          return lhs;
        }
      }
    }
    NodePtr term() {
      auto lhs = unary();
      for (;;) {
        if (accept('*')) {
          lhs = make(Op::kMul, {lhs, unary()});
        } else if (accept('/')) {
          lhs = make(Op::kDiv, {lhs, unary()});
        } else {
          return lhs;
        }
      }
    }
    NodePtr unary() {
      if (accept('-')) return make(Op::kNeg, {unary()});
      return power();
    }
    NodePtr power() {
      auto base = primary();
      if (accept('^')) return make(Op::kPow, {base, unary()});
      return base;
    }
    NodePtr primary() {
      skip_space();
      if (pos >= s.size()) fail("unexpected end of input");
      if (accept('(')) {
        auto inner = expr();
        expect(')');
        return inner;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("bad number");
        pos += static_cast<std::size_t>(end - begin);
        return make(Op::kConst, {}, v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name == "t") return make(Op::kVar, {});
        Op op;
        std::size_t arity;
        if (name == "sin") {
          op = Op::kSin, arity = 1;
        } else if (name == "log") {
          op = Op::kLog, arity = 1;
        } else if (name == "min") {
          op = Op::kMin, arity = 2;
        } else if (name == "max") {
          op = Op::kMax, arity = 2;
        } else {
          pos = start;
          fail("unknown name '" + name + "'");
        }
        expect('(');
        std::vector<NodePtr> args{expr()};
        while (accept(',')) args.push_back(expr());
        expect(')');
        if (args.size() != arity) fail("wrong number of arguments to " + name);
        return make(op, std::move(args));
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  Expression(NodePtr root, std::string text) : root_(std::move(root)), text_(std::move(text)) {}

  static double eval(const Node& n, double t) {
    auto arg = [&](std::size_t i) { return eval(*n.args[i], t); };
    switch (n.op) {
      case Op::kConst: return n.value;
      case Op::kVar: return t;
      case Op::kAdd: return arg(0) + arg(1);
      case Op::kSub: return arg(0) - arg(1);
      case Op::kMul: return arg(0) * arg(1);
      case Op::kDiv: return arg(0) / arg(1);
      case Op::kPow: return std::pow(arg(0), arg(1));
      case Op::kNeg: return -arg(0);
      case Op::kSin: return std::sin(arg(0));
      case Op::kLog: return std::log(arg(0));
      case Op::kMin: return std::min(arg(0), arg(1));
      case Op::kMax: return std::max(arg(0), arg(1));
    }
    return 0.0;
  }

  NodePtr root_;
  std::string text_;
};

}  // namespace leakscope
