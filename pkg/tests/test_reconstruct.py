import json

import pytest

from conftest import corpus_sources
from mcreduce.frontend import MicroCType, parse_source, print_tree, typecheck
from mcreduce.frontend.ast import (
    CAST,
    EMPTY_STMT,
    FUNC_DEF,
    FWD_DECL,
    INT_LIT,
    VAR_DECL,
)
from mcreduce.reconstruct import (
    ApplyError,
    DefaultError,
    PlanError,
    apply,
    apply_bare,
    default_value_for,
    plan,
    splice_uids,
)
from mcreduce.semgraph import (
    N_FUNC,
    N_LABEL,
    N_LOCAL,
    N_PARAM,
    N_STRUCT,
    build_graph,
    classify_semantic_nodes,
)


def graph_of(src):
    return build_graph(parse_source(src))


def node_named(graph, name, kind=None):
    for node in graph.nodes.values():
        tree_node = graph.tree.find(node.uid)
        if tree_node is not None and tree_node.value == name:
            if kind is None or node.kind == kind:
                return node
    raise AssertionError(f"no node named {name}")


def errors_of(tree):
    return [d for d in typecheck(tree) if d.severity == "error"]


def reduce_one(src, *names):
    graph = graph_of(src)
    requested = {node_named(graph, n).id for n in names}
    the_plan = plan(graph, requested)
    return graph, the_plan, apply(graph.tree, the_plan)


# -- default values ---------------------------------------------------------

def test_default_int_is_one():
    node = default_value_for(MicroCType("int"))
    assert node.kind == INT_LIT and node.value == 1


def test_default_pointer_is_cast_zero():
    node = default_value_for(MicroCType("int", 1))
    assert node.kind == CAST
    assert node.children[0].value == MicroCType("int", 1)
    assert node.children[1].value == 0


def test_default_struct_pointer_composes():
    t = MicroCType("S", 2, struct=True)
    node = default_value_for(t)
    assert node.kind == CAST and node.children[0].value == t


def test_default_void_and_plain_struct_fail():
    with pytest.raises(DefaultError):
        default_value_for(MicroCType("void"))
    with pytest.raises(DefaultError):
        default_value_for(MicroCType("S", 0, struct=True))


# -- the repair rules, one per provider/user pair ----------------------------

def test_struct_type_reference_becomes_deep_void():
    src = "struct S { int a; }; struct S* g; int main() { return g == (struct S*) 0; }"
    graph, the_plan, out = reduce_one(src, "S")
    assert errors_of(out) == []
    g_decl = next(n for n in out.nodes() if n.kind == VAR_DECL and n.value == "g")
    # One star from the declaration plus three from the substitution.
    assert g_decl.children[0].value == MicroCType("void", 4)
    assert "struct" not in print_tree(out)


def test_call_of_deleted_int_function_becomes_one():
    src = "int f(){return 2;} int main(){int x = f(); return x;}"
    graph, the_plan, out = reduce_one(src, "f")
    assert errors_of(out) == []
    x_decl = next(n for n in out.nodes() if n.kind == VAR_DECL and n.value == "x")
    assert x_decl.children[1].kind == INT_LIT and x_decl.children[1].value == 1


def test_call_of_deleted_pointer_function_becomes_cast_zero():
    src = "int* h(){return (int*)0;} int main(){int* p = h(); return 0;}"
    graph, the_plan, out = reduce_one(src, "h")
    assert errors_of(out) == []
    p_decl = next(n for n in out.nodes() if n.kind == VAR_DECL and n.value == "p")
    init = p_decl.children[1]
    assert init.kind == CAST and init.children[0].value == MicroCType("int", 1)
    assert init.children[1].value == 0


def test_void_call_statement_becomes_empty_statement():
    src = "void g(){} int main(){ g(); return 0; }"
    graph, the_plan, out = reduce_one(src, "g")
    assert errors_of(out) == []
    body = next(n for n in out.nodes() if n.kind == FUNC_DEF and n.value == "main").children[2]
    assert body.children[0].kind == EMPTY_STMT


def test_function_used_as_value_becomes_deep_void_cast():
    src = "int f(){return 1;} int main(){ void*** p = f; return 0; }"
    graph, the_plan, out = reduce_one(src, "f")
    assert errors_of(out) == []
    p_decl = next(n for n in out.nodes() if n.kind == VAR_DECL and n.value == "p")
    init = p_decl.children[1]
    assert init.kind == CAST and init.children[0].value == MicroCType("void", 3)
    assert init.children[1].value == 0


def test_deleted_variable_use_gets_declared_type_default():
    src = "int main(){ int v = 3; print(v); return 0; }"
    graph = graph_of(src)
    v = node_named(graph, "v", N_LOCAL)
    out = apply(graph.tree, plan(graph, {v.id}))
    assert errors_of(out) == []
    assert "print(1)" in print_tree(out).replace(" ", "").replace("\n", "") or \
        "print(1);" in print_tree(out)


def test_goto_statement_deleted_with_its_label():
    src = "int main(){ goto L; L: print(1); return 0; }"
    graph = graph_of(src)
    label = next(n for n in graph.nodes.values() if n.kind == N_LABEL)
    the_plan = plan(graph, {label.id})
    out = apply(graph.tree, the_plan)
    assert errors_of(out) == []
    text = print_tree(out)
    assert "goto" not in text and "L" not in text


def test_goto_in_mandatory_position_becomes_empty_statement():
    src = "int main(){ if (1) goto L; L: print(1); return 0; }"
    graph = graph_of(src)
    label = next(n for n in graph.nodes.values() if n.kind == N_LABEL)
    out = apply(graph.tree, plan(graph, {label.id}))
    assert errors_of(out) == []
    text = print_tree(out)
    assert "goto" not in text
    assert "if(1);" in text


def test_param_arg_group_deleted_atomically():
    src = (
        "void f(int a, int b){print(a);} "
        "int main(){int arg = 5; f(1, arg + 2); return 0; }"
    )
    graph = graph_of(src)
    b = node_named(graph, "b", N_PARAM)
    the_plan = plan(graph, {b.id})
    group = next(g for g in graph.groups if b.id in g.members)
    assert group.members <= the_plan.deletions
    out = apply(graph.tree, the_plan)
    assert errors_of(out) == []
    f_def = next(n for n in out.nodes() if n.kind == FUNC_DEF and n.value == "f")
    assert [p.value for p in f_def.children[1].children] == ["a"]
    text = print_tree(out)
    assert "arg + 2" not in text and "f(1)" in text


def test_param_deletion_keeps_forward_declaration_in_sync():
    src = (
        "int f(int a, int b); "
        "int f(int a, int b){ return a; } "
        "int main(){ return f(1, 2); }"
    )
    graph = graph_of(src)
    b = node_named(graph, "b", N_PARAM)
    out = apply(graph.tree, plan(graph, {b.id}))
    assert errors_of(out) == []
    fwd = next(n for n in out.nodes() if n.kind == FWD_DECL)
    assert [p.value for p in fwd.children[1].children] == ["a"]


def test_deleting_definition_takes_forward_declaration_along():
    src = "int f(int a); int f(int a){ return a; } int main(){ return f(1); }"
    graph, the_plan, out = reduce_one(src, "f")
    assert errors_of(out) == []
    kinds = {n.kind for n in out.nodes()}
    assert FWD_DECL not in kinds and "f" not in print_tree(out)


def test_uselessfunc_deletion_reaches_fig5_shape(hello_source):
    # Deleting the useless function leaves literal 1 at both call sites.
    graph = graph_of(hello_source)
    useless = node_named(graph, "uselessFunc", N_FUNC)
    out = apply(graph.tree, plan(graph, {useless.id}))
    assert errors_of(out) == []
    text = print_tree(out)
    assert "uselessFunc" not in text
    assert text.count("= 1;") == 2


# -- composition corners ------------------------------------------------------

def test_default_repairs_compose_with_struct_deletion():
    src = (
        "struct S { int a; }; "
        "int main() { struct S* p; if (p == 0) print(7); return 0; }"
    )
    graph = graph_of(src)
    requested = {node_named(graph, "S", N_STRUCT).id, node_named(graph, "p", N_LOCAL).id}
    out = apply(graph.tree, plan(graph, requested))
    assert errors_of(out) == []
    text = print_tree(out)
    assert "struct" not in text and "void * * * *" in print_tree(out).replace("*", " * ").replace("  ", " ") or "void" in text


def test_plain_struct_value_use_has_no_repair():
    src = (
        "struct S { int a; }; "
        "int main() { struct S v; struct S w; w = v; return 0; }"
    )
    graph = graph_of(src)
    v = node_named(graph, "v", N_LOCAL)
    with pytest.raises(PlanError):
        plan(graph, {v.id})


def test_unreferenced_declaration_deletes_cleanly():
    src = "int main() { int z; print(4); return 0; }"
    graph = graph_of(src)
    z = node_named(graph, "z", N_LOCAL)
    the_plan = plan(graph, {z.id})
    assert not the_plan.rewrites
    out = apply(graph.tree, the_plan)
    assert errors_of(out) == []
    assert "z" not in print_tree(out)


def test_apply_flags_noncompiling_result():
    # Force a bogus plan by requesting args directly: plan refuses them.
    graph = graph_of("int g(){return 1;} int main(){return g();}")
    arg_like = [n.id for n in graph.nodes.values() if n.kind == "arg"]
    if arg_like:
        with pytest.raises(PlanError):
            plan(graph, set(arg_like))


def test_group_closure_property_on_corpus():
    for name, src in corpus_sources():
        graph = graph_of(src)
        for candidate in classify_semantic_nodes(graph):
            try:
                the_plan = plan(graph, {candidate})
            except PlanError:
                continue
            for group in graph.groups:
                if group.members & the_plan.deletions:
                    assert group.members <= the_plan.deletions or not (
                        {m for m in group.members & the_plan.deletions
                         if graph.nodes[m].kind in (N_PARAM, N_FUNC, "fwd_decl")}
                    ), (name, candidate, group)


def test_single_candidate_plans_compile_on_corpus():
    # The module contract: apply never hands the oracle a broken program.
    for name, src in corpus_sources():
        graph = graph_of(src)
        for candidate in classify_semantic_nodes(graph):
            try:
                the_plan = plan(graph, {candidate})
                out = apply(graph.tree, the_plan)
            except PlanError:
                continue
            except ApplyError as exc:
                raise AssertionError(f"{name} candidate {candidate}: {exc}") from exc
            assert errors_of(out) == [], (name, candidate)


def test_rewrites_never_add_declarations_on_corpus():
    for name, src in corpus_sources():
        tree = parse_source(src)
        graph = build_graph(tree)
        decls_before = sum(1 for n in tree.nodes() if n.kind in (VAR_DECL, FUNC_DEF, FWD_DECL))
        for candidate in classify_semantic_nodes(graph):
            try:
                out = apply(tree, plan(graph, {candidate}))
            except PlanError:
                continue
            decls_after = sum(
                1 for n in out.nodes() if n.kind in (VAR_DECL, FUNC_DEF, FWD_DECL)
            )
            assert decls_after <= decls_before, (name, candidate)


def test_plan_serializes_to_json_line(hello_source):
    graph = graph_of(hello_source)
    useless = node_named(graph, "uselessFunc", N_FUNC)
    line = plan(graph, {useless.id}).to_json_line()
    decoded = json.loads(line)
    assert "\n" not in line
    assert set(decoded) == {
        "requested", "deletions", "delete_uids", "rewrites", "param_filters", "arg_filters",
    }


def test_splice_refuses_mandatory_positions():
    tree = parse_source("int main() { while (1) print(1); return 0; }")
    body = next(n for n in tree.nodes() if n.kind == "while_stmt").children[1]
    with pytest.raises(ApplyError):
        splice_uids(tree, {body.uid})


def test_apply_bare_leaves_breakage_visible():
    src = "int f(int a){return a;} int main(){ return f(1); }"
    graph = graph_of(src)
    a = node_named(graph, "a", N_PARAM)
    bare = apply_bare(graph.tree, graph, {a.id})
    assert errors_of(bare)  # arity mismatch survives on purpose
