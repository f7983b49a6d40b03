"""
結果台帳のテスト
"""
import pytest

from margin_sampler.config.database import DatabaseConfig
from margin_sampler.services.database_service import ResultsLedger
from margin_sampler.utils.error_handlers import DatabaseError


@pytest.fixture
def ledger(tmp_path):
    return ResultsLedger(DatabaseConfig(str(tmp_path / "results" / "ledger.db")))


def test_disabled_ledger_raises(monkeypatch):
    monkeypatch.delenv('RESULTS_DATABASE', raising=False)
    with pytest.raises(DatabaseError) as excinfo:
        ResultsLedger(DatabaseConfig())
    assert excinfo.value.error_code == "LEDGER_DISABLED"


def test_run_lifecycle(ledger):
    run_id = ledger.start_run('check-uniformity', heuristic='cgm', seed=3, sample_count=10, margins_hash='abc')
    ledger.record_replicate(run_id, 2, 0.5, log_q0=-3.0, log_weight_min=1.0, log_weight_max=1.5)
    ledger.record_replicate(run_id, 1, 0.25, log_q0=-2.0, log_weight_min=1.0, log_weight_max=1.25)
    ledger.complete_run(run_id)

    runs = ledger.get_runs()
    assert len(runs) == 1
    assert runs.loc[0, 'status'] == 'completed'
    assert runs.loc[0, 'heuristic'] == 'cgm'
    assert runs.loc[0, 'finished_at'] is not None

    replicates = ledger.get_replicates(run_id)
    assert list(replicates['replicate']) == [1, 2]
    assert list(replicates['log_delta']) == [0.25, 0.5]


def test_replicates_survive_reopen(tmp_path):
    path = str(tmp_path / "ledger.db")
    first = ResultsLedger(DatabaseConfig(path))
    run_id = first.start_run('check-uniformity')
    first.record_replicate(run_id, 1, 0.1)
    # 完了前に中断しても記録済みの反復は残る
    second = ResultsLedger(DatabaseConfig(path))
    assert second.get_runs().loc[0, 'status'] == 'running'
    assert len(second.get_replicates(run_id)) == 1


def test_in_memory_ledger():
    ledger = ResultsLedger(DatabaseConfig(':memory:'))
    run_id = ledger.start_run('count')
    ledger.complete_run(run_id, status='failed')
    assert ledger.get_runs().loc[0, 'status'] == 'failed'
    assert ledger.get_replicates(run_id).empty
