"""
공통 pytest fixture

작은 매니폴드 집합, 작은 합성 데이터셋, 작은 네트워크, 임시 출력 디렉토리
"""
import numpy as np
import pytest

from app.core.config import settings
from app.domain.experiments.schemas import AnalysisSchedule, ExperimentConfig
from app.domain.geometry.schemas import GeometryConfig, ManifoldSet
from app.domain.net.schemas import NetSpec, TrainConfig
from app.domain.synthdata.generator import generate_spheres, permute_labels
from app.domain.synthdata.schemas import SphereDatasetSpec


@pytest.fixture(autouse=True)
def quiet_progress(monkeypatch):
    """테스트 중 tqdm 진행바 끄기"""
    monkeypatch.setattr(settings, "SHOW_PROGRESS", False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noise_set(rng):
    """가우시안 잡음 매니폴드 P=10, M=20, N=200"""
    return ManifoldSet(
        manifolds=[rng.standard_normal((20, 200)) for _ in range(10)],
        class_ids=list(range(10)),
    )


@pytest.fixture
def tiny_spec():
    return SphereDatasetSpec(
        n_classes=4, ambient_dim=16, sphere_dim=3, radius=0.5,
        samples_per_class=20, test_per_class=10, seed=0,
    )


@pytest.fixture
def tiny_data(tiny_spec):
    return permute_labels(generate_spheres(tiny_spec), 0.5, seed=1)


@pytest.fixture
def tiny_net_spec():
    return NetSpec(layer_widths=[16, 12, 8, 4], seed=0)


@pytest.fixture
def tiny_cfg(tiny_spec, tiny_net_spec, tmp_path):
    """몇 초 안에 끝나는 전체 실험 설정"""
    return ExperimentConfig(
        dataset=tiny_spec,
        epsilon=0.5,
        permutation_seed=1,
        net=tiny_net_spec,
        train=TrainConfig(learning_rate=1e-2, batch_size=16, max_epochs=6, seed=0),
        analysis=AnalysisSchedule(
            n_log_epochs=2,
            p_sel=4,
            m_sel=3,
            selection_seed=0,
            geometry=GeometryConfig(n_samples=20, seed=0),
        ),
        output_dir=str(tmp_path / "out"),
    )
