#include "tsms/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "tsms/errors.hpp"
#include "tsms/kernels.hpp"
#include "tsms/series_name.hpp"

namespace tsms::expr {

namespace {

const std::string kOpNames[] = {
    "BASE",  "SCALE", "SEL",   "PROJ",  "WIN",    "MAVG",      "XAVG",
    "RSI",   "MOM",   "SHIFT", "PLUS",  "MINUS",  "MULT",      "DIVIDE",
    "UNION", "INTERSECT", "JOIN", "REF",
};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return out;
}

bool is_reserved(const std::string& up) {
    static const std::set<std::string> words = {
        "SCALE", "SEL",  "PROJ",  "WIN",   "MAVG",  "XAVG",      "RSI",
        "MOM",   "SHIFT", "PLUS", "MINUS", "MULT",  "DIVIDE",    "UNION",
        "INTERSECT", "JOIN", "MACD", "BUY", "SELL", "SUM",       "PRODUCT",
        "MAX",   "MIN",  "AVG",   "IDENTITY", "SQUARE", "ABS",   "EXP",
    };
    return words.count(up) > 0;
}

std::size_t window_param(const ExprNode& n) {
    return static_cast<std::size_t>(n.params.at(0));
}

double xavg_alpha(const ExprNode& n) {
    if (n.params.size() >= 2) return n.params[1];
    return 2.0 / (n.params[0] + 1.0);
}

} // namespace

const std::string& op_name(OpId id) { return kOpNames[static_cast<std::size_t>(id)]; }

ExprPtr make_base(std::string name) {
    auto node = std::make_shared<ExprNode>();
    node->op = OpId::Base;
    node->base = std::move(name);
    return node;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct ParsedArg {
    enum Kind { Tree, Number, Pred, Ident } kind;
    ExprPtr tree;
    double num = 0;
    Predicate pred{CmpOp::Gt, 0};
    std::string ident;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse_top() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("trailing characters", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    bool ident_start(char c) const {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    bool ident_char(char c) const {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    std::string parse_ident() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(begin, pos_ - begin));
    }

    double parse_number() {
        skip_ws();
        std::size_t begin = pos_;
        if (peek() == '+') ++pos_;
        double v = 0;
        auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
        if (res.ec != std::errc())
            throw SyntaxError("expected a number", begin);
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        if (!std::isfinite(v)) throw SyntaxError("number out of range", begin);
        return v;
    }

    ParsedArg parse_arg() {
        skip_ws();
        char c = peek();
        ParsedArg arg{ParsedArg::Number, nullptr, 0, Predicate{CmpOp::Gt, 0}, ""};
        if (c == '>' || c == '<' || c == '=' || c == '!') {
            std::size_t begin = pos_;
            CmpOp op;
            if (text_.compare(pos_, 2, ">=") == 0) { op = CmpOp::Ge; pos_ += 2; }
            else if (text_.compare(pos_, 2, "<=") == 0) { op = CmpOp::Le; pos_ += 2; }
            else if (text_.compare(pos_, 2, "!=") == 0) { op = CmpOp::Ne; pos_ += 2; }
            else if (c == '>') { op = CmpOp::Gt; ++pos_; }
            else if (c == '<') { op = CmpOp::Lt; ++pos_; }
            else if (c == '=') { op = CmpOp::Eq; ++pos_; }
            else throw SyntaxError("bad predicate", begin);
            arg.kind = ParsedArg::Pred;
            arg.pred = Predicate{op, parse_number()};
            return arg;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
            arg.kind = ParsedArg::Number;
            arg.num = parse_number();
            return arg;
        }
        if (ident_start(c)) {
            std::string name = parse_ident();
            skip_ws();
            if (peek() == '(') {
                arg.kind = ParsedArg::Tree;
                arg.tree = parse_call(name);
            } else {
                arg.kind = ParsedArg::Ident;
                arg.ident = std::move(name);
            }
            return arg;
        }
        throw SyntaxError("expected an argument", pos_);
    }

    ExprPtr parse_expr() {
        skip_ws();
        if (!ident_start(peek())) throw SyntaxError("expected an expression", pos_);
        std::size_t begin = pos_;
        std::string name = parse_ident();
        skip_ws();
        if (peek() == '(') return parse_call(name);
        if (is_reserved(upper(name)))
            throw SyntaxError("reserved word used as a series name: " + name, begin);
        return make_base(std::move(name));
    }

    std::vector<ParsedArg> parse_arg_list() {
        ++pos_; // '('
        std::vector<ParsedArg> args;
        skip_ws();
        if (peek() == ')') throw SyntaxError("empty argument list", pos_);
        while (true) {
            args.push_back(parse_arg());
            skip_ws();
            if (peek() == ',') { ++pos_; continue; }
            if (peek() == ')') { ++pos_; break; }
            throw SyntaxError("expected ',' or ')'", pos_);
        }
        return args;
    }

    ExprPtr as_tree(ParsedArg& a, const std::string& op) {
        if (a.kind == ParsedArg::Tree) return a.tree;
        if (a.kind == ParsedArg::Ident) {
            if (is_reserved(upper(a.ident)))
                throw ArityError(op + ": reserved word used as a series name: " + a.ident);
            return make_base(a.ident);
        }
        throw ArityError(op + ": expected a series argument");
    }

    double as_number(const ParsedArg& a, const std::string& op) {
        if (a.kind != ParsedArg::Number)
            throw ArityError(op + ": expected a numeric argument");
        return a.num;
    }

    std::size_t as_window(const ParsedArg& a, const std::string& op) {
        double v = as_number(a, op);
        if (v < 1 || v != std::floor(v) || v > 1e9)
            throw ArityError(op + ": window must be a positive integer");
        return static_cast<std::size_t>(v);
    }

    CombineFn as_combine(const ParsedArg& a, const std::string& op) {
        if (a.kind != ParsedArg::Ident)
            throw ArityError(op + ": expected a combine function name");
        return combine_fn_from_string(upper(a.ident));
    }

    static std::shared_ptr<ExprNode> make_op(OpId op, std::vector<ExprPtr> children,
                                             std::vector<double> params = {}) {
        auto node = std::make_shared<ExprNode>();
        node->op = op;
        node->children = std::move(children);
        node->params = std::move(params);
        return node;
    }

    static ExprPtr make_mavg(ExprPtr child, std::size_t w) {
        return make_op(OpId::Mavg, {std::move(child)}, {double(w)});
    }

    ExprPtr parse_call(const std::string& raw_name) {
        const std::string op = upper(raw_name);
        std::vector<ParsedArg> args = parse_arg_list();
        auto need = [&](std::size_t k) {
            if (args.size() != k)
                throw ArityError(op + " expects " + std::to_string(k) + " arguments, got " +
                                 std::to_string(args.size()));
        };

        if (op == "SCALE") {
            need(2);
            return make_op(OpId::Scale, {as_tree(args[0], op)}, {as_number(args[1], op)});
        }
        if (op == "SEL") {
            need(2);
            if (args[1].kind != ParsedArg::Pred)
                throw ArityError("SEL: second argument must be a predicate like >0");
            auto node = make_op(OpId::Sel, {as_tree(args[0], op)});
            node->pred = args[1].pred;
            return node;
        }
        if (op == "PROJ") {
            need(2);
            if (args[1].kind != ParsedArg::Ident)
                throw ArityError("PROJ: second argument must be a map function name");
            auto node = make_op(OpId::Proj, {as_tree(args[0], op)});
            node->map_fn = map_fn_from_string(upper(args[1].ident));
            return node;
        }
        if (op == "WIN") {
            need(3);
            CombineFn fn = as_combine(args[0], op);
            std::size_t w = as_window(args[1], op);
            if (fn == CombineFn::Divide && w != 2)
                throw ArityError("WIN: DIVIDE windows have exactly two entries");
            auto node = make_op(OpId::Win, {as_tree(args[2], op)}, {double(w)});
            node->combine = fn;
            return node;
        }
        if (op == "MAVG" || op == "RSI" || op == "MOM") {
            need(2);
            OpId id = op == "MAVG" ? OpId::Mavg : op == "RSI" ? OpId::Rsi : OpId::Mom;
            return make_op(id, {as_tree(args[0], op)}, {double(as_window(args[1], op))});
        }
        if (op == "XAVG") {
            if (args.size() != 2 && args.size() != 3)
                throw ArityError("XAVG expects (series, window[, alpha])");
            std::vector<double> params{double(as_window(args[1], op))};
            if (args.size() == 3) {
                double alpha = as_number(args[2], op);
                if (!(alpha > 0.0 && alpha <= 1.0))
                    throw ArityError("XAVG: alpha must lie in (0,1]");
                params.push_back(alpha);
            }
            return make_op(OpId::Xavg, {as_tree(args[0], op)}, std::move(params));
        }
        if (op == "SHIFT") {
            need(1);
            return make_op(OpId::Shift, {as_tree(args[0], op)});
        }
        if (op == "PLUS" || op == "MINUS" || op == "MULT" || op == "DIVIDE" ||
            op == "UNION" || op == "INTERSECT") {
            need(2);
            OpId id = op == "PLUS"     ? OpId::Plus
                      : op == "MINUS"  ? OpId::Minus
                      : op == "MULT"   ? OpId::Mult
                      : op == "DIVIDE" ? OpId::Divide
                      : op == "UNION"  ? OpId::Union
                                       : OpId::Intersect;
            return make_op(id, {as_tree(args[0], op), as_tree(args[1], op)});
        }
        if (op == "JOIN") {
            if (args.size() < 3)
                throw ArityError("JOIN expects at least two series and a combine function");
            CombineFn fn = as_combine(args.back(), op);
            std::vector<ExprPtr> children;
            for (std::size_t i = 0; i + 1 < args.size(); ++i)
                children.push_back(as_tree(args[i], op));
            if (fn == CombineFn::Divide && children.size() != 2)
                throw ArityError("JOIN: DIVIDE joins exactly two series");
            auto node = make_op(OpId::Join, std::move(children));
            node->combine = fn;
            return node;
        }

        // Strategy shorthands expand into the primitive operators.
        if (op == "MACD") {
            need(3);
            ExprPtr child = as_tree(args[0], op);
            std::size_t short_w = as_window(args[1], op);
            std::size_t long_w = as_window(args[2], op);
            if (short_w >= long_w)
                throw ArityError("MACD: short window must be smaller than the long one");
            return make_op(OpId::Minus,
                           {make_mavg(child, short_w), make_mavg(child, long_w)});
        }
        if (op == "BUY") {
            need(1);
            ExprPtr s = as_tree(args[0], op);
            ExprPtr diff = make_op(OpId::Minus, {make_mavg(s, 12), make_mavg(s, 26)});
            auto node = make_op(OpId::Sel, {make_mavg(diff, 9)});
            node->pred = Predicate{CmpOp::Gt, 0.0};
            return node;
        }
        if (op == "SELL") {
            need(1);
            ExprPtr s = as_tree(args[0], op);
            ExprPtr ratio = make_op(OpId::Divide, {make_mavg(s, 26), make_mavg(s, 12)});
            auto node = make_op(OpId::Sel, {std::move(ratio)});
            node->pred = Predicate{CmpOp::Gt, 1.1};
            return node;
        }

        throw UnknownOperator(op);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

ExprPtr parse(std::string_view text) { return Parser(text).parse_top(); }

// ---------------------------------------------------------------------------
// Serialization and canonical form

std::string canonical_name(const ExprNode& node) {
    switch (node.op) {
    case OpId::Base: return node.base;
    case OpId::Scale:
        return "SCALE(" + canonical_name(*node.children[0]) + "," +
               format_number(node.params[0]) + ")";
    case OpId::Sel:
        return "SEL(" + canonical_name(*node.children[0]) + "," +
               node.pred->to_string() + ")";
    case OpId::Proj:
        return "PROJ(" + canonical_name(*node.children[0]) + "," +
               tsms::to_string(*node.map_fn) + ")";
    case OpId::Win:
        return "WIN(" + tsms::to_string(*node.combine) + "," +
               format_number(node.params[0]) + "," +
               canonical_name(*node.children[0]) + ")";
    case OpId::Mavg:
    case OpId::Rsi:
    case OpId::Mom:
        return op_name(node.op) + "(" + canonical_name(*node.children[0]) + "," +
               format_number(node.params[0]) + ")";
    case OpId::Xavg: {
        std::string out = "XAVG(" + canonical_name(*node.children[0]) + "," +
                          format_number(node.params[0]);
        // An explicit alpha equal to the default 2/(w+1) is dropped.
        if (node.params.size() >= 2 &&
            node.params[1] != 2.0 / (node.params[0] + 1.0))
            out += "," + format_number(node.params[1]);
        return out + ")";
    }
    case OpId::Shift:
        return "SHIFT(" + canonical_name(*node.children[0]) + ")";
    case OpId::Plus:
    case OpId::Mult:
        return commutative_pair_name(op_name(node.op), canonical_name(*node.children[0]),
                                     canonical_name(*node.children[1]));
    case OpId::Minus:
    case OpId::Divide:
    case OpId::Union:
    case OpId::Intersect:
        return op_name(node.op) + "(" + canonical_name(*node.children[0]) + "," +
               canonical_name(*node.children[1]) + ")";
    case OpId::Join: {
        std::string out = "JOIN(";
        for (const auto& c : node.children) out += canonical_name(*c) + ",";
        return out + tsms::to_string(*node.combine) + ")";
    }
    case OpId::Ref:
        return "$" + format_number(node.params[0]);
    }
    throw EngineError("unserializable node");
}

ExprPtr canonicalize(const ExprPtr& node) {
    if (node->is_base()) return node;
    auto out = std::make_shared<ExprNode>(*node);
    for (auto& c : out->children) c = canonicalize(c);
    if (out->op == OpId::Plus || out->op == OpId::Mult) {
        if (canonical_name(*out->children[1]) < canonical_name(*out->children[0]))
            std::swap(out->children[0], out->children[1]);
    }
    if (out->op == OpId::Xavg && out->params.size() >= 2 &&
        out->params[1] == 2.0 / (out->params[0] + 1.0))
        out->params.resize(1);
    return out;
}

std::size_t lookback(const ExprNode& node) {
    std::size_t own = 0;
    switch (node.op) {
    case OpId::Win:
    case OpId::Mavg:
    case OpId::Xavg: own = window_param(node) - 1; break;
    case OpId::Rsi:
    case OpId::Mom: own = window_param(node); break;
    case OpId::Shift: own = 1; break;
    default: break;
    }
    std::size_t deepest = 0;
    for (const auto& c : node.children) deepest = std::max(deepest, lookback(*c));
    return own + deepest;
}

std::vector<std::string> base_names(const ExprNode& node) {
    std::vector<std::string> out;
    auto walk = [&](auto&& self, const ExprNode& n) -> void {
        if (n.is_base()) {
            if (std::find(out.begin(), out.end(), n.base) == out.end())
                out.push_back(n.base);
            return;
        }
        for (const auto& c : n.children) self(self, *c);
    };
    walk(walk, node);
    return out;
}

bool is_atomic(const ExprNode& node) {
    switch (node.op) {
    case OpId::Base: return true;
    case OpId::Scale:
    case OpId::Sel:
    case OpId::Proj:
    case OpId::Win:
    case OpId::Mavg:
    case OpId::Xavg:
    case OpId::Rsi:
    case OpId::Mom:
    case OpId::Shift: return is_atomic(*node.children[0]);
    default: return false;
    }
}

ExprPtr rewrite_joins(const ExprPtr& node) {
    if (node->is_base()) return node;
    auto out = std::make_shared<ExprNode>(*node);
    for (auto& c : out->children) c = rewrite_joins(c);
    bool decomposable = out->combine == CombineFn::Sum ||
                        out->combine == CombineFn::Product ||
                        out->combine == CombineFn::Max || out->combine == CombineFn::Min;
    if (out->op == OpId::Join && out->children.size() > 2 && decomposable) {
        ExprPtr acc = out->children[0];
        for (std::size_t i = 1; i < out->children.size(); ++i) {
            auto pair = std::make_shared<ExprNode>();
            pair->op = OpId::Join;
            pair->combine = out->combine;
            pair->children = {acc, out->children[i]};
            acc = pair;
        }
        return acc;
    }
    return out;
}

Decomposition decompose(const ExprPtr& node) {
    Decomposition d;
    ExprPtr exec = rewrite_joins(canonicalize(node));
    auto build = [&](auto&& self, const ExprPtr& n) -> ExprPtr {
        if (is_atomic(*n)) {
            d.atomics.push_back(n);
            auto ref = std::make_shared<ExprNode>();
            ref->op = OpId::Ref;
            ref->params = {double(d.atomics.size() - 1)};
            return ref;
        }
        auto out = std::make_shared<ExprNode>(*n);
        for (auto& c : out->children) c = self(self, c);
        return out;
    };
    d.plan = build(build, exec);
    return d;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<Value> apply_op(const ExprNode& node,
                            std::span<const std::span<const Value>> children) {
    switch (node.op) {
    case OpId::Scale: return kernels::scale(node.params[0], children[0]);
    case OpId::Sel: return kernels::sel(*node.pred, children[0]);
    case OpId::Proj: return kernels::proj(*node.map_fn, children[0]);
    case OpId::Win: return kernels::win(*node.combine, window_param(node), children[0]);
    case OpId::Mavg: return kernels::mavg(window_param(node), children[0]);
    case OpId::Xavg:
        return kernels::xavg(window_param(node), xavg_alpha(node), children[0]);
    case OpId::Rsi: return kernels::rsi(window_param(node), children[0]);
    case OpId::Mom: return kernels::mom(window_param(node), children[0]);
    case OpId::Shift: return kernels::shift(children[0]);
    case OpId::Plus: return kernels::pointwise(kernels::PointwiseOp::Add, children[0], children[1]);
    case OpId::Minus: return kernels::pointwise(kernels::PointwiseOp::Sub, children[0], children[1]);
    case OpId::Mult: return kernels::pointwise(kernels::PointwiseOp::Mul, children[0], children[1]);
    case OpId::Divide: return kernels::pointwise(kernels::PointwiseOp::Div, children[0], children[1]);
    case OpId::Union: return kernels::set_union(children[0], children[1]);
    case OpId::Intersect: return kernels::set_intersect(children[0], children[1]);
    case OpId::Join: return kernels::join(*node.combine, children);
    case OpId::Base:
    case OpId::Ref: break;
    }
    throw EngineError("apply_op on a non-operator node");
}

namespace {

class SliceEvaluator {
public:
    explicit SliceEvaluator(const LeafResolver& leaf) : leaf_(leaf) {}

    std::span<const Value> eval(const ExprNode& node) {
        if (node.is_base()) return leaf_(node.base);
        std::string key = canonical_name(node);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::vector<std::span<const Value>> kids;
        kids.reserve(node.children.size());
        for (const auto& c : node.children) kids.push_back(eval(*c));
        auto out = apply_op(node, kids);
        auto [it, inserted] = memo_.emplace(std::move(key), std::move(out));
        return it->second;
    }

private:
    const LeafResolver& leaf_;
    std::map<std::string, std::vector<Value>> memo_;
};

} // namespace

std::vector<Value> eval_slice(const ExprNode& node, const LeafResolver& leaf) {
    SliceEvaluator ev(leaf);
    auto out = ev.eval(node);
    return std::vector<Value>(out.begin(), out.end());
}

TimeSeries evaluate(const ExprNode& node, const SeriesEnv& env,
                    const QueryInterval& interval) {
    std::vector<std::string> names = base_names(node);
    if (names.empty()) throw EngineError("expression references no series");
    auto lookup = [&](const std::string& name) -> const TimeSeries& {
        auto it = env.find(name);
        if (it == env.end()) throw UnknownBaseSeries(name);
        return it->second;
    };
    const TimeSeries& first = lookup(names.front());
    for (std::size_t i = 1; i < names.size(); ++i)
        detail::require_same_frame(first, lookup(names[i]));
    if (interval.start > interval.end || interval.start < first.start() ||
        interval.end > first.end())
        throw EngineError("query interval [" + std::to_string(interval.start) + "," +
                          std::to_string(interval.end) + "] outside series domain");

    LeafResolver leaf = [&](const std::string& name) -> std::span<const Value> {
        return env.at(name).values();
    };
    std::vector<Value> all = eval_slice(node, leaf);
    std::vector<Value> vals(all.begin() + (interval.start - first->start()),
                            all.begin() + (interval.end - first->start() + 1));
    return TimeSeries(canonical_name(node), first->calendar(), interval.start,
                      interval.end, std::move(vals));
}

TimeSeries evaluate(const ExprPtr& node, const SeriesEnv& env,
                    const QueryInterval& interval) {
    return evaluate(*node, env, interval);
}

} // namespace tsms::expr
