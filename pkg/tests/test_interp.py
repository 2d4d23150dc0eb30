from mcreduce.frontend import run_source


def test_print_and_arithmetic():
    out = run_source("int main() { print(2 + 3 * 4); print(10 - 7); return 0; }")
    assert out.ok and out.output == "14\n3\n"


def test_division_truncates_toward_zero():
    src = "int main() { print(7 / 2); print(0 - 7 / 2); print((0 - 7) / 2); return 0; }"
    out = run_source(src)
    assert out.ok and out.output == "3\n-3\n-3\n"


def test_division_by_zero_is_runtime_error():
    out = run_source("int main() { int z = 0; print(1 / z); return 0; }")
    assert not out.ok and out.phase == "runtime" and "division by zero" in out.error


def test_comparisons_and_if_else():
    src = "int main() { if (1 < 2) print(1); else print(0); if (3 == 4) print(9); return 0; }"
    out = run_source(src)
    assert out.ok and out.output == "1\n"


def test_while_loop():
    src = "int main() { int i = 0; while (i < 4) { print(i); i = i + 1; } return 0; }"
    out = run_source(src)
    assert out.ok and out.output == "0\n1\n2\n3\n"


def test_goto_forward_and_backward():
    src = """
    int main() {
        int i = 0;
        again: i = i + 1;
        if (i < 3) goto again;
        goto done;
        print(999);
        done: print(i);
        return 0;
    }
    """
    out = run_source(src)
    assert out.ok and out.output == "3\n"


def test_pointers_and_address_of():
    src = """
    int g;
    int main() {
        int x = 5;
        int* p = &x;
        *p = 41;
        int** pp = &p;
        **pp = **pp + 1;
        g = *p;
        print(g);
        print(x);
        return 0;
    }
    """
    out = run_source(src)
    assert out.ok and out.output == "42\n42\n"


def test_uninitialized_variables_default_to_zero():
    out = run_source("int g; int main() { int x; print(x + g); return 0; }")
    assert out.ok and out.output == "0\n"


def test_fall_off_end_returns_zero():
    out = run_source("int f() { } int main() { print(f()); return 0; }")
    assert out.ok and out.output == "0\n"


def test_global_initializers_run_in_order():
    src = "int f() { return 3; } int a = f(); int b = a + 4; int main() { print(b); return 0; }"
    out = run_source(src)
    assert out.ok and out.output == "7\n"


def test_recursion():
    src = """
    int fact(int n);
    int fact(int n) { if (n < 2) return 1; return n * fact(n - 1); }
    int main() { print(fact(6)); return 0; }
    """
    out = run_source(src)
    assert out.ok and out.output == "720\n"


def test_missing_main_is_runtime_error():
    out = run_source("int f() { return 1; }")
    assert not out.ok and out.phase == "runtime" and "main" in out.error


def test_compile_error_phase():
    out = run_source("int main() { return y; }")
    assert not out.ok and out.phase == "compile" and out.output == ""


def test_step_limit_stops_infinite_loop():
    out = run_source("int main() { print(5); while (1) { } return 0; }", fuel=10_000)
    assert not out.ok and out.phase == "runtime" and "step limit" in out.error
    # Output printed before the limit is preserved for the oracle to see.
    assert out.output == "5\n"


def test_call_depth_limit():
    out = run_source("int f() { return f(); } int main() { return f(); }")
    assert not out.ok and out.phase == "runtime" and "depth" in out.error


def test_null_dereference_is_runtime_error():
    out = run_source("int main() { int* p = (int*) 0; print(*p); return 0; }")
    assert not out.ok and out.phase == "runtime" and "dereference" in out.error


def test_struct_values_are_opaque():
    src = "struct S { int a; }; struct S s; int main() { print((int) s); return 0; }"
    out = run_source(src)
    assert not out.ok and out.phase == "runtime"


def test_assignment_to_non_lvalue_is_discarded():
    out = run_source("int main() { 1 = 5; print(2); return 0; }")
    assert out.ok and out.output == "2\n"


def test_goto_into_nested_block_fails():
    src = "int main() { goto inner; if (0) { inner: print(1); } return 0; }"
    out = run_source(src)
    assert not out.ok and out.phase == "runtime" and "goto" in out.error
