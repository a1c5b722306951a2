# app/config.py
from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="ECUMENE_", extra="ignore")

    # Seed for random_model sampling in the soundness harnesses.
    seed: int = Field(default=0)
    budget_depth: int = Field(default=200, ge=1)
    budget_terms: int = Field(default=2, ge=1)
    budget_labels: int = Field(default=6, ge=1)
    max_worlds: int = Field(default=3, ge=1, le=6)
    log_level: str = Field(default="WARNING")
    # ginit/gcinit accepted by the LCE checker as expandable macros.
    lce_macro_expand: bool = Field(default=True)


settings = Settings()
