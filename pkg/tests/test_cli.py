import itertools
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rationals
from nilflat.cli import main
from nilflat.errors import InputError
from nilflat.exactlin import ScalarProduct
from nilflat.generators import gen_random
from nilflat.modelfile import ModelFile, emit_model, parse_model
from nilflat.multilinear import ThreeVector, classify_cone

GOLDEN = {"dimension": 6, "gram": "split(3,3)", "eta": [[4, 5, 6, "1"]],
          "structure": {"epsilon": 1, "preset": "split-para"}}


def write(tmp_path, data, name="model.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParse:
    def test_golden(self):
        m = parse_model(json.dumps(GOLDEN))
        assert m.eta == ThreeVector(6, {(4, 5, 6): 1})
        assert m.g == ScalarProduct.split(3)
        assert m.structure.epsilon == 1 and m.structure_preset == "split-para"

    def test_rational_strings(self):
        m = parse_model(json.dumps({**GOLDEN, "eta": [[4, 5, 6, "1/2"]]}))
        assert m.eta.coefficient(4, 5, 6) == Fraction(1, 2)

    def test_unordered_indices_carry_sign(self):
        m = parse_model(json.dumps({**GOLDEN, "eta": [[5, 4, 6, 3]]}))
        assert m.eta.coefficient(4, 5, 6) == -3

    @pytest.mark.parametrize("patch,where", [
        ({"eta": [[4, 5, 6, 1], [6, 5, 4, 2]]}, "eta[1]"),
        ({"eta": [[4, 4, 6, 1]]}, "eta[0]"),
        ({"eta": [[4, 5, 7, 1]]}, "eta[0][2]"),
        ({"eta": [[4, 5, 6, "1/0"]]}, "eta[0][3]"),
        ({"eta": [[4, 5, 6, 0.5]]}, "eta[0][3]"),
        ({"eta": [[4, 5, 6]]}, "eta[0]"),
        ({"gram": "split(3,2)"}, "gram"),
        ({"gram": "lorentz(3)"}, "gram"),
        ({"dimension": 2, "gram": [[1, 0], [0, 0]], "eta": []}, "gram"),
        ({"dimension": 2, "gram": [[1, 0], ["a", 1]], "eta": []}, "gram[1][0]"),
        ({"dimension": 0}, "dimension"),
        ({"structure": {"epsilon": -1, "preset": "split-para"}}, "structure.epsilon"),
        ({"structure": {"epsilon": 1, "preset": "split-para(4)"}}, "structure.preset"),
        ({"structure": {"epsilon": 1}}, "structure"),
        ({"structure": {"epsilon": 1, "matrix": [[1, 0, 0, 0, 0, 0]] * 6}}, "structure"),
        ({"lattice_scale": "-1"}, "lattice_scale"),
        ({"colour": 1}, "top level"),
    ])
    def test_errors_name_position(self, patch, where):
        with pytest.raises(InputError) as info:
            parse_model(json.dumps({**GOLDEN, **patch}))
        assert str(info.value).startswith(where + ":")

    def test_syntax_error_position(self):
        with pytest.raises(InputError) as info:
            parse_model('{"dimension": 6,\n "gram": }')
        assert str(info.value).startswith("line 2 column")

    def test_max_dim(self, monkeypatch):
        monkeypatch.setenv("NILFLAT_MAX_DIM", "4")
        with pytest.raises(InputError, match="NILFLAT_MAX_DIM"):
            parse_model(json.dumps(GOLDEN))

    def test_explicit_matrices(self):
        data = {"dimension": 2, "gram": [["0", "1"], [1, 0]], "eta": [],
                "structure": {"epsilon": 1, "matrix": [[-1, 0], [0, 1]]}, "lattice_scale": "1/2"}
        m = parse_model(json.dumps(data))
        assert m.gram_spec is None and m.structure_preset is None
        assert m.lattice_scale == Fraction(1, 2)
        assert parse_model(emit_model(m)) == m


@st.composite
def model_files(draw):
    kind = draw(st.sampled_from(["split", "diag", "explicit"]))
    k = draw(st.integers(1, 4))
    l = draw(st.integers(0, 4))
    n = k + l
    if kind == "explicit":
        gram = [[draw(rationals) if i == j else 0 for j in range(n)] for i in range(n)]
        gram = [[g if i != j or g else 1 for j, g in enumerate(row)] for i, row in enumerate(gram)]
        gram = [[str(x) for x in row] for row in gram]
    else:
        gram = f"{kind}({k},{l})"
    triples = list(itertools.combinations(range(1, n + 1), 3))
    eta = []
    if triples:
        chosen = draw(st.lists(st.sampled_from(triples), unique=True, max_size=5))
        for t in chosen:
            perm = draw(st.permutations(list(t)))
            eta.append(perm + [str(draw(rationals))])
    data = {"dimension": n, "gram": gram, "eta": eta}
    if draw(st.booleans()):
        data["lattice_scale"] = str(draw(st.fractions(min_value=Fraction(1, 5), max_value=5)))
    return json.dumps(data)


@given(model_files())
def test_round_trip(text):
    m = parse_model(text)
    assert isinstance(m, ModelFile)
    again = parse_model(emit_model(m))
    assert again == m
    assert emit_model(again) == emit_model(m)


class TestGenerators:
    def test_type_30_in_r33_is_multiple_of_golden(self):
        # Lambda^3 of the 3-dim plus eigenspace is the line through f1 ^ f2 ^ f3
        nonzero = 0
        for seed in range(10):
            raw = gen_random(seed, (3, 3), (3, 0), 1, conjugate=False).eta
            assert {t for t, _ in raw.terms} <= {(4, 5, 6)}
            nonzero += not raw.is_zero()
            s = gen_random(seed, (3, 3), (3, 0), 1)
            assert classify_cone(s.eta, s.g, s.structure).pure_plus
        assert nonzero

    def test_12_dim_33_is_generically_not_pure(self):
        types = {classify_cone(s.eta, s.g, s.structure).type_pq
                 for s in (gen_random(seed, (6, 6), (3, 3), 1) for seed in range(5))}
        assert (3, 3) in types

    @given(st.integers(0, 10**6), st.sampled_from([((3, 3), (3, 0), 1), ((4, 4), (1, 3), 1),
                                                  ((6, 6), (3, 3), 1), ((6, 6), (3, 0), -1),
                                                  ((4, 4), (2, 0), -1)]))
    def test_always_in_cone_and_anticommuting(self, seed, case):
        sig, pq, eps = case
        s = gen_random(seed, sig, pq, eps)
        rep = classify_cone(s.eta, s.g, s.structure)
        assert rep.in_cone and rep.anticommutes
        assert s.structure.epsilon == eps

    def test_determinism(self):
        assert gen_random(42, (5, 5), (2, 3), 1).eta == gen_random(42, (5, 5), (2, 3), 1).eta

    @pytest.mark.parametrize("sig,pq,eps", [((3, 3), (2, 2), 1), ((3, 4), (1, 0), 1),
                                            ((3, 3), (1, 0), -1), ((6, 6), (1, 1), -1),
                                            ((4, 4), (4, 0), 2), ((3, 3), (-1, 0), 1)])
    def test_infeasible(self, sig, pq, eps):
        with pytest.raises(InputError):
            gen_random(0, sig, pq, eps)


class TestCommands:
    def test_check_golden(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "check", write(tmp_path, GOLDEN))
        rep = json.loads(out)
        assert code == 0 and rep["passed"]
        assert rep["brackets"] == [[1, 2, ["0"] * 5 + ["2"]], [1, 3, ["0"] * 4 + ["-2", "0"]],
                                   [2, 3, ["0", "0", "0", "2", "0", "0"]]]
        assert rep["translation_ideal"]["dim"] == 3
        assert rep["nijenhuis_e1_e2_at_0"] == ["0"] * 5 + ["8"]
        assert rep["regular"] == {"type_pq": [3, 0], "regular": True, "s": 3}
        assert rep["centralizer"]["dimension"] == 6
        assert rep["derham"]["dim_v0"] == 0

    def test_verify_npk_mixed_type_fails_with_witness(self, tmp_path, capsys):
        path = write(tmp_path, {**GOLDEN, "eta": [[1, 5, 6, 1]]})
        code, out, _ = run_cli(capsys, "verify-npk", path)
        rep = json.loads(out)
        assert code == 1 and not rep["passed"]
        assert rep["checks"]["anticommutes"]["pass"] is False
        assert rep["checks"]["anticommutes"]["witness"] is not None

    def test_non_cone_fails(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "construct", write(tmp_path, {**GOLDEN, "eta": [[1, 2, 4, 1]]}))
        rep = json.loads(out)
        assert code == 1 and rep["checks"]["in_cone"]["witness"] == [1, 4]

    def test_input_errors_exit_2(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "check", write(tmp_path, "{not json"))
        assert code == 2 and "line 1" in err
        code, _, _ = run_cli(capsys, "check", str(tmp_path / "missing.json"))
        assert code == 2
        code, _, _ = run_cli(capsys, "verify-npk", write(tmp_path, {**GOLDEN, "structure": None}))
        assert code == 2
        with pytest.raises(SystemExit) as info:
            main(["random-suite", "--signature", "3"])
        assert info.value.code == 2

    def test_construct_json_out(self, tmp_path, capsys):
        out_path = tmp_path / "out.json"
        code, out, _ = run_cli(capsys, "construct", write(tmp_path, GOLDEN), "--json", str(out_path))
        assert code == 0 and out_path.read_text() == out

    @pytest.mark.parametrize("command", ["classify", "derham", "lattice", "centralizer"])
    def test_other_commands_pass_on_golden(self, tmp_path, capsys, command):
        code, out, _ = run_cli(capsys, command, write(tmp_path, GOLDEN))
        assert code == 0, out

    def test_lattice_with_bad_scale(self, tmp_path, capsys):
        path = write(tmp_path, {**GOLDEN, "eta": [[4, 5, 6, "1/2"]], "lattice_scale": "1"})
        code, out, _ = run_cli(capsys, "lattice", path)
        assert code == 1 and json.loads(out)["checks"]["lattice_closed"]["pass"] is False

    def test_mul(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "mul", write(tmp_path, GOLDEN),
                               "--x", "1,0,0,0,0,0", "--y", "0,1,0,0,0,1/2")
        rep = json.loads(out)
        assert code == 0
        assert rep["product"]["xy"] == ["1", "1", "0", "0", "0", "3/2"]
        code, _, _ = run_cli(capsys, "mul", write(tmp_path, GOLDEN), "--x", "1,0", "--y", "0,1")
        assert code == 2

    def test_random_suite_deterministic(self, capsys):
        args = ["random-suite", "--signature", "3,3", "--type", "3,0", "--epsilon", "+1",
                "--count", "4", "--seed", "11"]
        code1, out1, _ = run_cli(capsys, *args)
        code2, out2, _ = run_cli(capsys, *args)
        assert code1 == code2 == 0 and out1 == out2
        assert json.loads(out1)["summary"] == {"count": 4, "passed": 4}

    def test_random_suite_cone_only_and_dim(self, capsys):
        code, out, _ = run_cli(capsys, "random-suite", "--signature", "4,6", "--count", "3")
        assert code == 0
        code, out, _ = run_cli(capsys, "random-suite", "--dim", "6", "--count", "3", "--seed", "7")
        assert code == 0

    def test_console_script_module(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "nilflat.cli", "classify",
                               write(tmp_path, GOLDEN)], capture_output=True, text=True)
        assert proc.returncode == 0 and json.loads(proc.stdout)["cone"]["type_pq"] == [3, 0]
