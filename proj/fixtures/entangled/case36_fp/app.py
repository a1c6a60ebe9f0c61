class PlannerAgent:
    prompt = "You are the case 36 planner."
    retries = 2

    def brief(self):
        return self.prompt
