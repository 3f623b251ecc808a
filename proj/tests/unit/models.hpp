#pragma once

#include <string>

namespace chor2teal::test {

inline std::string fixture(const char* name) { return std::string(CHOR2TEAL_FIXTURES) + "/" + name; }

inline std::string wrap(const std::string& body) {
  return R"(<?xml version="1.0" encoding="UTF-8"?>
<bpmn2:definitions xmlns:bpmn2="http://www.omg.org/spec/BPMN/20100524/MODEL" id="D">
  <bpmn2:choreography id="mini" name="Mini">
    <bpmn2:participant id="A" name="Alice" />
    <bpmn2:participant id="B" name="Bob" />
)" + body + R"(
  </bpmn2:choreography>
</bpmn2:definitions>
)";
}

inline std::string task(const char* id, const char* name, const char* initiator, const char* recipient) {
  return std::string("<bpmn2:choreographyTask id=\"") + id + "\" name=\"" + name + "\" initiatingParticipantRef=\"" +
         initiator + "\"><bpmn2:participantRef>" + initiator + "</bpmn2:participantRef><bpmn2:participantRef>" +
         recipient + "</bpmn2:participantRef></bpmn2:choreographyTask>\n";
}

inline std::string flow(const char* id, const char* from, const char* to) {
  return std::string("<bpmn2:sequenceFlow id=\"") + id + "\" sourceRef=\"" + from + "\" targetRef=\"" + to + "\" />\n";
}

// start -> Ping (Alice) -> end
inline std::string minimal_model() {
  return wrap("<bpmn2:startEvent id=\"S\" />\n" + task("T", "Ping", "A", "B") + "<bpmn2:endEvent id=\"E\" />\n" +
              flow("f1", "S", "T") + flow("f2", "T", "E"));
}

// start -> AND split -> {Left (Alice), Right (Bob)} -> AND join -> end
inline std::string parallel_model() {
  return wrap("<bpmn2:startEvent id=\"S\" />\n<bpmn2:parallelGateway id=\"G1\" />\n" + task("L", "Left", "A", "B") +
              task("R", "Right", "B", "A") + "<bpmn2:parallelGateway id=\"G2\" />\n<bpmn2:endEvent id=\"E\" />\n" +
              flow("f1", "S", "G1") + flow("f2", "G1", "L") + flow("f3", "G1", "R") + flow("f4", "L", "G2") +
              flow("f5", "R", "G2") + flow("f6", "G2", "E"));
}

// start -> XOR -> {Yes (Alice), No (Bob)} -> XOR -> end
inline std::string choice_model() {
  return wrap("<bpmn2:startEvent id=\"S\" />\n<bpmn2:exclusiveGateway id=\"G1\" />\n" + task("Y", "Yes", "A", "B") +
              task("N", "No", "B", "A") + "<bpmn2:exclusiveGateway id=\"G2\" />\n<bpmn2:endEvent id=\"E\" />\n" +
              flow("f1", "S", "G1") + flow("f2", "G1", "Y") + flow("f3", "G1", "N") + flow("f4", "Y", "G2") +
              flow("f5", "N", "G2") + flow("f6", "G2", "E"));
}

} // namespace chor2teal::test
