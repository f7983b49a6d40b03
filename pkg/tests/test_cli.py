"""
コマンドラインのテスト
"""
import pytest

from margin_sampler.cli import main
from margin_sampler.config.database import DatabaseConfig
from margin_sampler.services.database_service import ResultsLedger


@pytest.fixture
def write_file(tmp_path):
    def write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write


@pytest.fixture
def small_file(write_file):
    return write_file("small.txt", "3 3\n2 1 1\n2 1 1\n")


@pytest.fixture
def unit_file(write_file):
    return write_file("unit.txt", "3 3\n1 1 1\n1 1 1\n")


def _key_values(text: str) -> dict:
    return dict(line.split('=', 1) for line in text.splitlines() if '=' in line and not line.startswith('#'))


def test_feasible_and_infeasible(capsys, small_file, write_file):
    assert main(['feasible', '--margins', small_file]) == 0
    assert capsys.readouterr().out.strip() == "FEASIBLE"
    bad = write_file("bad.txt", "4 3\n3 1 1 1\n3 3 0\n")
    assert main(['feasible', '--margins', bad]) == 1
    assert capsys.readouterr().out.strip() == "INFEASIBLE"


def test_feasible_with_zero_diagonal(capsys, unit_file, write_file):
    assert main(['feasible', '--margins', unit_file, '--zero-diagonal']) == 0
    zeros = write_file("zeros.txt", "1 1\n2 2\n3 3\n")
    assert main(['feasible', '--margins', unit_file, '--zeros', zeros]) == 0
    assert capsys.readouterr().out.split() == ["FEASIBLE", "FEASIBLE"]


def test_usage_errors(capsys, write_file):
    broken = write_file("broken.txt", "3 3\n2 1\n2 1 1\n")
    assert main(['feasible', '--margins', broken]) == 2
    assert "broken.txt:2:" in capsys.readouterr().err
    assert main(['feasible']) == 2
    assert main(['no-such-command']) == 2
    assert main(['feasible', '--margins', broken, '--log-level', 'loud']) == 2
    assert main(['count', '--margins', broken, '--heuristic', 'uniform']) == 2


def test_jobs_must_be_positive_or_all_cores(capsys, small_file):
    assert main(['count', '--margins', small_file, '--jobs', '0']) == 2
    assert "--jobs" in capsys.readouterr().err
    assert main(['count', '--margins', small_file, '--jobs', '-2']) == 2


def test_unknown_heuristic(capsys, small_file):
    assert main(['count', '--margins', small_file, '--heuristic', 'uniform']) == 2
    assert "uniform" in capsys.readouterr().err


def test_version(capsys):
    assert main(['--version']) == 0
    assert "1.0.0" in capsys.readouterr().out


def test_sample_to_stdout(capsys, small_file):
    assert main(['sample', '--margins', small_file, '--n', '3', '--seed', '4']) == 0
    out = capsys.readouterr().out
    assert "# seed=4" in out
    weight_lines = [line for line in out.splitlines() if line.startswith(('0 -', '1 -', '2 -'))]
    assert len(weight_lines) == 3


def test_sample_to_directory(capsys, small_file, tmp_path):
    out_dir = tmp_path / "out"
    assert main(['sample', '--margins', small_file, '--n', '4', '--out', str(out_dir)]) == 0
    blocks = (out_dir / "samples.txt").read_text(encoding='utf-8').strip().split("\n\n")
    assert len(blocks) == 4
    weights = (out_dir / "weights.txt").read_text(encoding='utf-8').splitlines()
    assert [line.split()[0] for line in weights if not line.startswith('#')] == ['0', '1', '2', '3']
    assert _key_values(capsys.readouterr().out)['samples'] == '4'


def test_sample_per_file(small_file, tmp_path):
    out_dir = tmp_path / "per"
    assert main(['sample', '--margins', small_file, '--n', '3', '--out', str(out_dir), '--format', 'per-file']) == 0
    assert sorted(p.name for p in out_dir.iterdir()) == ['sample_0.txt', 'sample_1.txt', 'sample_2.txt',
                                                         'weights.txt']


def test_sample_then_evaluate_agree(capsys, small_file, tmp_path, write_file):
    out_dir = tmp_path / "agree"
    main(['sample', '--margins', small_file, '--n', '2', '--seed', '8', '--out', str(out_dir)])
    capsys.readouterr()
    main(['evaluate', '--margins', small_file, '--matrix', str(out_dir / "samples.txt")])
    evaluated = [line for line in capsys.readouterr().out.splitlines() if not line.startswith('#')]
    sampled = [line for line in (out_dir / "weights.txt").read_text(encoding='utf-8').splitlines()
               if not line.startswith('#')]
    assert [float(line.split()[1]) for line in evaluated] == pytest.approx(
        [float(line.split()[1]) for line in sampled], abs=1e-9)


def test_evaluate_outside_support(capsys, small_file, write_file):
    matrices = write_file("z.txt", "1 1 0\n1 0 0\n0 0 1\n\n1 0 0\n0 1 0\n0 0 1\n")
    assert main(['evaluate', '--margins', small_file, '--matrix', matrices]) == 0
    lines = [line for line in capsys.readouterr().out.splitlines() if not line.startswith('#')]
    assert lines[0].startswith("0 -")
    assert lines[1] == "1 -inf"


def test_count_on_derangement(capsys, unit_file):
    assert main(['count', '--margins', unit_file, '--zero-diagonal', '--n', '20']) == 0
    out = capsys.readouterr().out
    assert "# heuristic=cgm_sz" in out
    values = _key_values(out)
    assert values['W_mean'] == "2.00000e+0"
    assert float(values['cv2_hat']) == pytest.approx(0.0, abs=1e-12)


def test_count_rejects_single_sample(capsys, small_file):
    assert main(['count', '--margins', small_file, '--n', '1']) == 2


def test_diagnose_runs_every_heuristic(capsys, small_file):
    assert main(['diagnose', '--margins', small_file, '--n', '10']) == 0
    values = _key_values(capsys.readouterr().out)
    for name in ('cgm', 'binomial', 'gmw', 'oneil'):
        assert f"{name}.cv2_hat" in values


def test_exact_count(capsys, small_file, write_file):
    assert main(['exact-count', '--margins', small_file]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "N = 5"
    assert _key_values(out)['method'] == 'closed-form'
    square = write_file("square.txt", "2 2\n1 1\n1 1\n")
    assert main(['exact-count', '--margins', square, '--zero-diagonal']) == 0
    values = _key_values(capsys.readouterr().out)
    assert values['N'] == '1'
    assert values['method'] == 'dp'


def test_enumerate(capsys, small_file, tmp_path):
    assert main(['enumerate', '--margins', small_file]) == 0
    assert _key_values(capsys.readouterr().out)['count'] == '5'
    out_dir = tmp_path / "omega"
    assert main(['enumerate', '--margins', small_file, '--out', str(out_dir)]) == 0
    text = (out_dir / "omega.txt").read_text(encoding='utf-8')
    assert len(text.strip().split("\n\n")) == 5


def test_enumerate_size_limit(capsys, write_file):
    big = write_file("big.txt", "6 5\n1 1 1 1 1 1\n2 1 1 1 1\n")
    assert main(['enumerate', '--margins', big]) == 2


def test_tv_distance(capsys, unit_file):
    assert main(['tv-distance', '--margins', unit_file, '--zero-diagonal']) == 0
    values = _key_values(capsys.readouterr().out)
    assert values['heuristic'] == 'cgm_sz'
    assert float(values['tv']) <= 0.2
    assert values['N'] == '2'
    assert 0.0 < float(values['q_total']) <= 1.0 + 1e-12


def test_check_uniformity_rowgen_with_ledger(capsys, small_file, tmp_path):
    db = str(tmp_path / "ledger.db")
    assert main(['check-uniformity', '--margins', small_file, '--L', '3', '--n', '5', '--db', db]) == 0
    values = _key_values(capsys.readouterr().out)
    assert float(values['delta_max']) >= 1.0
    ledger = ResultsLedger(DatabaseConfig(db))
    runs = ledger.get_runs()
    assert runs.loc[0, 'status'] == 'completed'
    assert len(ledger.get_replicates(int(runs.loc[0, 'id']))) == 3


def test_check_uniformity_block(capsys, write_file):
    regular = write_file("regular.txt", "4 4\n2 2 2 2\n2 2 2 2\n")
    assert main(['check-uniformity', '--margins', regular, '--mode', 'block', '--n', '10']) == 0
    values = _key_values(capsys.readouterr().out)
    assert float(values['delta_star']) >= float(values['delta_internal'])


def test_check_uniformity_greedy(capsys, small_file):
    assert main(['check-uniformity', '--margins', small_file, '--mode', 'greedy', '--n', '10']) == 0
    assert 'log_delta_star' in _key_values(capsys.readouterr().out)


def test_check_uniformity_block_requires_regular_margins(capsys, small_file):
    assert main(['check-uniformity', '--margins', small_file, '--mode', 'block']) == 2
