# --------------------------------------------------
# config.py
# --------------------------------------------------

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="HOROLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Resolução das funções escada
    # MAX_BREAKPOINTS: teto de breakpoints de qualquer StepFunction (órbitas Koopman dobram a cada passo)
    MAX_BREAKPOINTS: int = Field(default=2**22, ge=2)
    # MAX_DYADIC_DEPTH: maior n aceito por rademacher(n) / orbit_from_one(n)
    MAX_DYADIC_DEPTH: int = Field(default=22, ge=1)

    # Tolerâncias
    BREAKPOINT_TOL: float = Field(default=1e-14, gt=0)
    ATOM_MERGE_TOL: float = Field(default=1e-12, gt=0)
    PROBABILITY_TOL: float = Field(default=1e-12, gt=0)
    CONTRACT_TOL: float = Field(default=1e-12, gt=0)
    PROBE_TOL: float = Field(default=1e-9, gt=0)

    # Pesos de misturas atômicas são arredondados para este denominador
    RATIONAL_DENOMINATOR: int = Field(default=2**20, ge=1)

    # Certificado de Alspach: busca exaustiva só até esta profundidade diádica
    CERTIFICATE_MAX_DEPTH: int = Field(default=4, ge=1)

    # Classificação tau = 0 (razão de a_n/n entre os dois últimos pontos dobrados)
    ZERO_TAU_RATIO: float = Field(default=0.9, gt=0, lt=1)
    ZERO_TAU_TOL: float = Field(default=1e-9, gt=0)

    LOG_LEVEL: str = Field(default="INFO")


# Instância global para importar em todo o projeto
settings = Settings()
