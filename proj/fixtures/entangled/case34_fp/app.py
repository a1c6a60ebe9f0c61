class PlannerAgent:
    prompt = "You are the case 34 planner."
    retries = 2

    def brief(self):
        return self.prompt
