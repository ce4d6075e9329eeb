import hashlib

from hypothesis import given, settings, strategies as st

from semverml.jsparse import (
    ARROW_FUNCTION,
    COMMENT,
    FUNCTION_DECL,
    FUNCTION_EXPR,
    METHOD,
    PARAM,
    PROGRAM,
    VAR_DECL,
    cyclomatic,
    file_metrics,
    normalize_slice,
    parse_js,
)


def kinds(ast, kind):
    return [n for n in ast.root.walk() if n.kind == kind]


class TestGrammar:
    def test_function_declaration(self):
        ast = parse_js("function f(a){return a}")
        fns = kinds(ast, FUNCTION_DECL)
        assert len(fns) == 1 and fns[0].name == "f"
        params = kinds(ast, PARAM)
        assert len(params) == 1 and params[0].name == "a"

    def test_global_and_comment(self):
        ast = parse_js("const x = 1; // note")
        decls = kinds(ast, VAR_DECL)
        assert len(decls) == 1 and decls[0].name == "x"
        assert len(kinds(ast, COMMENT)) == 1

    def test_empty_source(self):
        ast = parse_js("")
        assert ast.root.kind == PROGRAM
        assert ast.root.children == []

    def test_expression_forms(self):
        src = """
const a = function named(x) { return x; };
const b = (y) => y * 2;
const obj = { run(z) { return z; }, go: function (w) { return w; } };
class Box { open(k) { return k; } }
"""
        ast = parse_js(src)
        assert len(kinds(ast, FUNCTION_EXPR)) == 2
        assert len(kinds(ast, ARROW_FUNCTION)) == 1
        assert len(kinds(ast, METHOD)) == 2
        assert {n.name for n in kinds(ast, VAR_DECL)} == {"a", "b", "obj"}

    def test_inner_declarations_are_statements_not_globals(self):
        ast = parse_js("function f() { const hidden = 1; return hidden; }")
        assert kinds(ast, VAR_DECL) == []

    def test_spans_nest(self):
        src = """function outer(a) {
  if (a) {
    return a + 1;
  }
  return 0;
}
"""
        ast = parse_js(src)
        for node in ast.root.walk():
            for child in node.children:
                assert node.span[0] <= child.span[0]
                assert child.span[1] <= node.span[1]

    def test_text_hash_is_fingerprint_of_normalized_slice(self):
        src = "function f(a) {\n  return   a;\n}\n"
        ast = parse_js(src)
        fn = kinds(ast, FUNCTION_DECL)[0]
        normalized = normalize_slice(src[fn.start:fn.end])
        assert " ".join(normalized.split()) == normalized  # runs collapsed
        digest = hashlib.blake2b(normalized.encode(), digest_size=8).digest()
        assert fn.text_hash == int.from_bytes(digest, "big")

    def test_whitespace_insensitive_hash(self):
        a = parse_js("function f(a){return a;}")
        b = parse_js("function  f( a )  { return a; }")
        fa = kinds(a, FUNCTION_DECL)[0]
        fb = kinds(b, FUNCTION_DECL)[0]
        assert fa.text_hash == fb.text_hash


class TestCyclomatic:
    def test_straight_line(self):
        ast = parse_js("function f(){}")
        assert cyclomatic(ast)["total"] == 1

    def test_single_if(self):
        ast = parse_js("function f(x){ if(x) return 1; return 2 }")
        assert cyclomatic(ast)["total"] == 2

    def test_and_plus_ternary(self):
        ast = parse_js("function f(a,b){ return a && b ? 1 : 0 }")
        assert cyclomatic(ast)["total"] == 3

    def test_nested_functions_counted_separately(self):
        src = """function outer(x) {
  function inner(y) { return y ? 1 : 2; }
  return inner(x) && x;
}"""
        ast = parse_js(src)
        per = {f.name: v for f, v in cyclomatic(ast)["per_function"].items()}
        assert per == {"outer": 2, "inner": 2}

    def test_optional_chaining_and_nullish_not_counted(self):
        ast = parse_js("function f(o){ return o?.a ?? 1; }")
        assert cyclomatic(ast)["total"] == 1

    @given(st.lists(st.integers(0, 8), min_size=0, max_size=12),
           st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_generated_bodies_count_n_plus_one(self, picks, salt):
        # statement templates paired with their decision-point counts
        templates = [
            ("const vK = x + K;", 0),
            ("if (x > K) { use(K); }", 1),
            ("for (let iK = 0; iK < x; iK++) { use(iK); }", 1),
            ("while (x > K) { x--; }", 1),
            ("do { x--; } while (x > K);", 2),
            ("const tK = x ? K : -K;", 1),
            ("use(x && K);", 1),
            ("use(x || K);", 1),
            ("try { use(K); } catch (eK) { log(eK); }", 1),
        ]
        body = []
        expected = 0
        for pos, pick in enumerate(picks):
            text, decisions = templates[pick % len(templates)]
            body.append(text.replace("K", str(salt % 97 + pos)))
            expected += decisions
        src = "function generated(x) {\n  " + "\n  ".join(body) + "\n}"
        per = cyclomatic(parse_js(src))["per_function"]
        assert list(per.values()) == [expected + 1]


class TestFileMetrics:
    def test_average(self):
        src = """function a() {}
function b(x) {
  if (x > 0) { return x; }
  return x ? 1 : 0;
}
"""
        m = file_metrics(parse_js(src))
        assert m.function_count == 2
        assert m.cyclomatic_total == 4
        assert m.cyclomatic_avg == 2.0

    def test_loc_skips_blank_lines(self):
        src = "const a = 1;\n\nconst b = 2;\nconst c = 3;\n  \n"
        m = file_metrics(parse_js(src))
        assert m.loc == 3

    def test_no_functions_avg_zero(self):
        m = file_metrics(parse_js("const a = 1;"))
        assert m.cyclomatic_avg == 0.0
        assert m.global_var_names == {"a"}


class TestTotality:
    @given(st.binary(max_size=400))
    @settings(max_examples=150, deadline=None)
    def test_parse_any_bytes(self, blob):
        text = blob.decode("utf-8", "replace")
        ast = parse_js(text)
        assert ast.root.kind == PROGRAM

    def test_pathological_nesting(self):
        ast = parse_js("{" * 3000)
        assert ast.root.kind == PROGRAM
        ast = parse_js("(" * 2000 + "x" + ")" * 2000)
        assert ast.root.kind == PROGRAM

    def test_unterminated_constructs(self):
        for src in ("'abc", '"abc\ndef', "`tpl ${x", "/* never closed",
                    "// eof", "/regex"):
            assert parse_js(src).root.kind == PROGRAM

    def test_stray_tokens_never_stall(self):
        for src in ("const o = { ) };", "x = { ] , ) };", "f({ : , })",
                    "o = {,,,}", "class C { ( }", "export",
                    "if (x) export", "x = ²;", "const ٣ = 1;"):
            assert parse_js(src).root.kind == PROGRAM

    def test_deterministic(self):
        src = "function f(a) { return a && 1; }\nconst z = [1,2,3];\n"
        a, b = parse_js(src), parse_js(src)
        ha = [(n.kind, n.name, n.text_hash, n.span) for n in a.root.walk()]
        hb = [(n.kind, n.name, n.text_hash, n.span) for n in b.root.walk()]
        assert ha == hb
