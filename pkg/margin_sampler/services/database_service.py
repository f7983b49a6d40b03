"""
実験結果の台帳サービス（SQLite）
"""
from contextlib import contextmanager
from datetime import datetime
from typing import Optional

import pandas as pd
from sqlalchemy import (
    Column, DateTime, Float, ForeignKey, Integer, MetaData, String, Table, create_engine, insert, select, update
)
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from ..config.database import DatabaseConfig
from ..config.logging_config import app_logger
from ..utils.error_handlers import DatabaseError

metadata = MetaData()

experiment_runs = Table(
    'experiment_runs',
    metadata,
    Column('id', Integer, primary_key=True, autoincrement=True),
    Column('command', String(50), nullable=False),
    Column('heuristic', String(20)),
    Column('seed', Integer),
    Column('sample_count', Integer),
    Column('margins_hash', String(64)),
    Column('started_at', DateTime),
    Column('finished_at', DateTime),
    Column('status', String(20), nullable=False)
)

replicate_results = Table(
    'replicate_results',
    metadata,
    Column('id', Integer, primary_key=True, autoincrement=True),
    Column('run_id', Integer, ForeignKey('experiment_runs.id'), nullable=False),
    Column('replicate', Integer, nullable=False),
    Column('log_delta', Float),
    Column('log_q0', Float),
    Column('log_weight_min', Float),
    Column('log_weight_max', Float)
)


class ResultsLedger:
    """実行と反復ごとの結果を記録する。反復は1件ずつコミットする"""

    def __init__(self, config: Optional[DatabaseConfig] = None):
        """初期化"""
        self.config = config or DatabaseConfig()
        if not self.config.enabled:
            raise DatabaseError("結果台帳のパスが設定されていません", error_code="LEDGER_DISABLED")
        self._setup_engine()

    def _setup_engine(self) -> None:
        try:
            url = self.config.get_sqlite_connection_string()
            options = {'echo': False}
            if url == "sqlite://":
                options.update(connect_args={'check_same_thread': False}, poolclass=StaticPool)
            self.engine = create_engine(url, **options)
            metadata.create_all(self.engine)
            self.Session = sessionmaker(bind=self.engine)
            app_logger.info(f"結果台帳を開きました: {self.config.sqlite_config['database']}")
        except Exception as e:
            app_logger.error(f"結果台帳のセットアップに失敗しました: {e}")
            raise DatabaseError(f"結果台帳を開けません: {e}", error_code="LEDGER_SETUP_ERROR")

    @contextmanager
    def get_session(self):
        """セッションを取得（コンテキストマネージャー）"""
        session = self.Session()
        try:
            yield session
            session.commit()
        except Exception as e:
            session.rollback()
            app_logger.error(f"結果台帳の操作でエラーが発生しました: {e}")
            raise DatabaseError(f"結果台帳の操作に失敗しました: {e}", error_code="LEDGER_WRITE_ERROR")
        finally:
            session.close()

    def start_run(
        self,
        command: str,
        heuristic: Optional[str] = None,
        seed: Optional[int] = None,
        sample_count: Optional[int] = None,
        margins_hash: Optional[str] = None
    ) -> int:
        with self.get_session() as session:
            result = session.execute(insert(experiment_runs).values(
                command=command,
                heuristic=heuristic,
                seed=seed,
                sample_count=sample_count,
                margins_hash=margins_hash,
                started_at=datetime.now(),
                status='running'
            ))
            run_id = int(result.inserted_primary_key[0])
        app_logger.debug(f"実行を記録しました: run_id={run_id}, command={command}")
        return run_id

    def record_replicate(
        self,
        run_id: int,
        replicate: int,
        log_delta: float,
        log_q0: Optional[float] = None,
        log_weight_min: Optional[float] = None,
        log_weight_max: Optional[float] = None
    ) -> None:
        with self.get_session() as session:
            session.execute(insert(replicate_results).values(
                run_id=run_id,
                replicate=replicate,
                log_delta=log_delta,
                log_q0=log_q0,
                log_weight_min=log_weight_min,
                log_weight_max=log_weight_max
            ))

    def complete_run(self, run_id: int, status: str = 'completed') -> None:
        with self.get_session() as session:
            session.execute(
                update(experiment_runs)
                .where(experiment_runs.c.id == run_id)
                .values(finished_at=datetime.now(), status=status)
            )
        app_logger.info(f"実行を完了しました: run_id={run_id}, status={status}")

    def get_replicates(self, run_id: int) -> pd.DataFrame:
        """反復ごとの結果を DataFrame で返す"""
        with self.get_session() as session:
            result = session.execute(
                select(replicate_results)
                .where(replicate_results.c.run_id == run_id)
                .order_by(replicate_results.c.replicate)
            )
            return pd.DataFrame(result.fetchall(), columns=list(result.keys()))

    def get_runs(self) -> pd.DataFrame:
        with self.get_session() as session:
            result = session.execute(select(experiment_runs).order_by(experiment_runs.c.id))
            return pd.DataFrame(result.fetchall(), columns=list(result.keys()))
