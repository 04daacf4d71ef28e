from pydantic import BaseModel, ConfigDict, PositiveFloat, PositiveInt, model_validator


class Timers(BaseModel):
    """Control-plane timer constants and message sizes for one scenario."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    refresh_period: PositiveFloat = 30.0
    state_timeout: PositiveFloat = 90.0
    hello_interval: PositiveFloat = 0.005
    hello_ack_timeout: PositiveFloat = 0.0175
    sweep_interval: PositiveFloat = 0.005
    path_msg_size: PositiveInt = 120
    hello_msg_size: PositiveInt = 20

    @model_validator(mode="after")
    def check_orderings(self):
        if not self.state_timeout > self.refresh_period:
            raise ValueError("state_timeout must exceed refresh_period")
        if not self.hello_ack_timeout > self.hello_interval:
            raise ValueError("hello_ack_timeout must exceed hello_interval")
        return self

    @property
    def detection_bound(self) -> float:
        """Worst-case delay between a hard link failure and its detection."""
        return self.hello_ack_timeout + self.sweep_interval + self.hello_interval
