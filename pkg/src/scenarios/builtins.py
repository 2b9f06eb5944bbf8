# -*- coding: utf-8 -*-
from typing import List

from src.cluster.model import ROOT_DIRECTORY, PayloadRoute, Volume, VolumeKind, service_account_principal
from src.engine.actions import (
    AddNodePort,
    Authenticate,
    ChrootEscape,
    Connect,
    ConsumeTopic,
    DeletePod,
    DeployImage,
    EditBuildStep,
    JenkinsLogin,
    KubectlApply,
    KubectlExec,
    PodManifest,
    PullImage,
    ReadNodeKubeconfig,
    RunBuild,
    ServiceManifest,
    TriggerPayloadRoute,
)
from src.scenarios.model import (
    ClusterAdminObtained,
    CrossNamespacePodDeleted,
    ExternallyReachable,
    PayloadRouteServed,
    Prerequisite,
    Scenario,
    TopicDataRead,
)

BROKER_SERVICE = "strimzi-service"
BROKER_NAMESPACE = "kafka"
BROKER_POD = "strimzi-kafka-0"
SIPHONED_TOPIC = "orders"

DEPLOYER = service_account_principal("developer", "deployer")
CRUD_ACCOUNT = service_account_principal("developer", "crud-sa")
INGRESS_EDITOR = service_account_principal("kafka", "ingress-editor")
JENKINS_DEPLOYER = service_account_principal("apps", "jenkins-deployer")
JENKINS_USER = "dev-jenkins"
NODE_ADMIN = "kube-node"

BUILD_JOB = "pyapp-build"
APP_IMAGE = "pyapp:2"
APP_NAMESPACE = "apps"
APP_POD = "pyapp"
APP_SERVICE = "pyapp-service"
HACK_ROUTE = PayloadRoute(route="/hack", disclosed_file="requirements.txt")


def topic_siphon() -> Scenario:
    return Scenario(
        id="scenario-1",
        title="Siphon broker topic data through a relay application",
        prerequisite=Prerequisite(
            description="Service account able to deploy applications in one namespace",
            subject=DEPLOYER,
        ),
        steps=[
            # Confirm kubeconfig matches the desired K8s cluster (line 2)
            Authenticate(subject=DEPLOYER),
            # kubectl apply -f name_of_custom_app.yaml (line 8)
            KubectlApply(
                manifest=PodManifest(
                    name="custom-app", namespace=BROKER_NAMESPACE, image="custom-app:1", labels={"app": "custom-app"}
                )
            ),
            # kubectl get services -n name_of_namespace_where_custom_app_is_located (lines 19-20)
            KubectlApply(
                manifest=ServiceManifest(
                    name="custom-app-ui",
                    namespace=BROKER_NAMESPACE,
                    selector={"app": "custom-app"},
                    port=5000,
                    node_port=31080,
                )
            ),
            # Navigate to URL from previous step (line 22)
            Connect(service="custom-app-ui", namespace=BROKER_NAMESPACE),
            # Plug in values and clusterIP:Port of Strimzi from previous step (line 26)
            Connect(service=BROKER_SERVICE, namespace=BROKER_NAMESPACE),
            # Verify data is sent/received to/from Strimzi (lines 28-29)
            ConsumeTopic(service=BROKER_SERVICE, namespace=BROKER_NAMESPACE, topic=SIPHONED_TOPIC),
        ],
        goal=[TopicDataRead(topic=SIPHONED_TOPIC)],
    )


def build_backdoor() -> Scenario:
    return Scenario(
        id="scenario-2",
        title="Backdoor an application image through its CI build",
        prerequisite=Prerequisite(description="Access to a privileged Jenkins account", subject=JENKINS_USER),
        steps=[
            # Jenkins login - input username/password (lines 2-3)
            JenkinsLogin(user=JENKINS_USER),
            # Edit build step by inputting malicious payload (lines 11-12)
            EditBuildStep(
                job=BUILD_JOB,
                step_index=1,
                script="append the hack route to f_pc.py",
                payload=HACK_ROUTE,
            ),
            # Run Jenkins build (line 15)
            RunBuild(job=BUILD_JOB),
            # Confirm kubeconfig matches the desired K8s cluster (line 2)
            Authenticate(subject=JENKINS_DEPLOYER),
            # docker pull repo_name/image_name/tag (line 21)
            PullImage(image=APP_IMAGE),
            # kubectl apply -f name_of_image.yaml (line 24)
            DeployImage(image=APP_IMAGE, namespace=APP_NAMESPACE, pod=APP_POD),
            # Navigate to new URL path python_app_url/hack (line 27)
            TriggerPayloadRoute(service=APP_SERVICE, namespace=APP_NAMESPACE, url_path=HACK_ROUTE.route),
        ],
        goal=[PayloadRouteServed(path=HACK_ROUTE.route, disclosed_file=HACK_ROUTE.disclosed_file)],
    )


def broker_exposure() -> Scenario:
    return Scenario(
        id="scenario-3",
        title="Expose the internal broker service to external traffic",
        prerequisite=Prerequisite(description="Privileges to add ingress objects", subject=INGRESS_EDITOR),
        steps=[
            # Confirm kubeconfig matches the desired K8s cluster (line 2)
            Authenticate(subject=INGRESS_EDITOR),
            # Add NodePort network object to Strimzi (lines 13-25)
            AddNodePort(service=BROKER_SERVICE, namespace=BROKER_NAMESPACE, node_port=30500),
            # Contact the newly exposed IP to confirm data can be sent/received (lines 27-28)
            Connect(service=BROKER_SERVICE, namespace=BROKER_NAMESPACE),
        ],
        goal=[ExternallyReachable(service=BROKER_SERVICE, namespace=BROKER_NAMESPACE)],
    )


def namespace_breakout() -> Scenario:
    escape_volume = Volume(kind=VolumeKind.HOST_PATH, mount_point="/host", host_directory=ROOT_DIRECTORY)
    return Scenario(
        id="scenario-4",
        title="Break out of a namespace through a hostPath volume",
        prerequisite=Prerequisite(description="Account with CRUD privileges in one namespace", subject=CRUD_ACCOUNT),
        steps=[
            # Confirm kubeconfig matches the desired K8s cluster (line 2)
            Authenticate(subject=CRUD_ACCOUNT),
            # kubectl apply -f attacker_pod_name.yaml (line 6)
            KubectlApply(
                manifest=PodManifest(
                    name="attacker-pod",
                    namespace="developer",
                    image="alpine:3.18",
                    labels={"app": "attacker-pod"},
                    volumes=[escape_volume],
                )
            ),
            # kubectl -n crud_namespace exec -it attack_pod_name bash (lines 9-10)
            KubectlExec(pod="attacker-pod", namespace="developer"),
            # chroot /host/ bash (line 22)
            ChrootEscape(),
            # /location/to/kubectl --kubeconfig=/location/to/kubecfg-kube-node.yaml (lines 28-29)
            ReadNodeKubeconfig(),
            # /location/to/kubectl --kubeconfig=/location/to/kubecfg-kube-node.yaml get pods -A (lines 32-34)
            Authenticate(subject=NODE_ADMIN),
            # /location/to/kubectl --kubeconfig=/location/to/kubecfg-kube-node.yaml
            #   delete pod pod_name -n pod_namespace (lines 37-39)
            DeletePod(pod=BROKER_POD, namespace=BROKER_NAMESPACE),
        ],
        goal=[ClusterAdminObtained(), CrossNamespacePodDeleted()],
    )


def builtin_scenarios() -> List[Scenario]:
    """The four attacks against the canonical environment, in order."""
    return [topic_siphon(), build_backdoor(), broker_exposure(), namespace_breakout()]
