#include "c2o/wellformed.hpp"

#include "c2o/normalize.hpp"

namespace c2o {

namespace {

struct Walker {
    std::vector<Diagnostic>& out;

    // guarded: this position is only evaluated at non-initial instants of the
    // current pre-nesting level (we descended through some arrow's right side).
    // in_pre: inside some pre operand (selects the diagnostic kind).
    void walk(const ExprPtr& e, bool guarded, bool in_pre) {
        if (auto* p = e->as<Pre>()) {
            if (!guarded) {
                out.push_back(Diagnostic{
                    Severity::Error,
                    in_pre ? DiagCode::NestedPreWithoutArrow : DiagCode::UnguardedPre,
                    e->span,
                    in_pre ? "'pre' nested inside another 'pre' without an intervening '->'"
                           : "'pre' is not guarded by the right side of any '->'"});
            }
            walk(p->operand, false, true);
            return;
        }
        if (auto* a = e->as<Arrow>()) {
            walk(a->init, guarded, in_pre);
            walk(a->rest, true, in_pre);
            return;
        }
        if (auto* f = e->as<FieldSelect>()) walk(f->base, guarded, in_pre);
        else if (auto* u = e->as<Unary>()) walk(u->operand, guarded, in_pre);
        else if (auto* b = e->as<Binary>()) {
            walk(b->lhs, guarded, in_pre);
            walk(b->rhs, guarded, in_pre);
        } else if (auto* i = e->as<Ite>()) {
            walk(i->cond, guarded, in_pre);
            walk(i->then_branch, guarded, in_pre);
            walk(i->else_branch, guarded, in_pre);
        } else if (auto* call = e->as<Call>()) {
            for (const auto& arg : call->args) walk(arg, guarded, in_pre);
        }
    }
};

} // namespace

std::vector<Diagnostic> check_temporal_wellformedness(const Contract& c) {
    Contract inlined = inline_nodes(c);
    std::vector<Diagnostic> diags;
    Walker w{diags};
    for (const auto& e : inlined.eqs) w.walk(e.expr, false, false);
    for (const auto& a : inlined.assumes) w.walk(a.expr, false, false);
    for (const auto& g : inlined.guarantees) w.walk(g.expr, false, false);
    return diags;
}

void require_wellformed(const Contract& c) {
    auto diags = check_temporal_wellformedness(c);
    if (!diags.empty()) throw CompileError(std::move(diags));
}

} // namespace c2o
